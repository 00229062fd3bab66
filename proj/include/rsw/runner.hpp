#ifndef RSW_RUNNER_HPP
#define RSW_RUNNER_HPP

#include <string>
#include <vector>

#include "rsw/config.hpp"
#include "rsw/observables.hpp"

namespace rsw::runner {

// One scan cell: minimum squeezing over time for a (alpha, N) pair.
struct ScanCell {
    double alpha = 0.0;
    int num_spins = 0;
    double min_xi2 = 0.0;
    double t_min = 0.0;
    double inertia = 0.0;
    bool depolarized = false;  // no interior minimum before <J^x> collapsed
};

struct ScanSlope {
    double alpha = 0.0;
    double slope = 0.0;      // d log(min xi^2) / d log N
    double intercept = 0.0;
};

ScanCell scan_cell(double alpha, int num_spins, const lattice::LatticeSpec& base);
std::vector<ScanSlope> fit_slopes(const std::vector<ScanCell>& cells);

// Per-time relative deviations between the RSW records and the exact ones.
struct CompareRow {
    double t = 0.0;
    observables::ObservableRecord rsw;
    observables::ObservableRecord ed;
    double dev_jx = 0.0;   // |jx_rsw - jx_ed| / |jx_ed|
    double dev_xi2 = 0.0;  // |xi2_rsw - xi2_ed| / xi2_ed
};

std::vector<CompareRow> oracle_compare(const config::RunConfig& cfg);

// CLI entry points; each writes its data files + metadata echo under out_dir
// and returns the created file names.
std::vector<std::string> cmd_dynamics(const config::RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_scan(const config::RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_tos(const config::RunConfig& cfg, const std::string& out_dir);
std::vector<std::string> cmd_oracle_compare(const config::RunConfig& cfg,
                                            const std::string& out_dir);

}  // namespace rsw::runner

#endif
