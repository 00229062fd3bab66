#ifndef RSW_OBSERVABLES_HPP
#define RSW_OBSERVABLES_HPP

#include <limits>
#include <span>
#include <vector>

#include "rsw/lattice.hpp"
#include "rsw/rotor.hpp"
#include "rsw/spinwave.hpp"

namespace rsw::observables {

inline constexpr double not_computed = std::numeric_limits<double>::quiet_NaN();
inline constexpr double depolarized_sentinel = std::numeric_limits<double>::infinity();

// One correlation entry, split into the two sectors plus their sum.
struct CorrEntry {
    double rotor = 0.0;
    double sw = 0.0;
    double total = 0.0;
};

struct ObservableRecord {
    double t = 0.0;
    // rotor sector
    double kx_mean = 0.0;
    double kx_var = 0.0;
    // combined collective spin
    double jx_mean = 0.0;
    double jx_var = 0.0;
    double var_perp_min = 0.0;
    double xi2 = 1.0;  // Wineland parameter; +inf when depolarized
    // boson densities
    double n0_frac = 0.0;   // <b_0^dag b_0>/N
    double nfm_frac = 0.0;  // N_FM/N
    // conserved u(1) charges
    double jz_mean = 0.0;
    double jz_var = 0.0;
    // correlation maps by displacement index (entry 0 = on-site); empty unless requested
    std::vector<CorrEntry> cyy;
    std::vector<CorrEntry> czz;
    // entropies (NaN unless requested)
    double s2_rotor = not_computed;
    double s2_sw = not_computed;
    double s2_total = not_computed;
    // validity flags
    bool rsw_valid = true;      // N_FM/N <= threshold
    bool var_negative = false;  // additive Var(J^x) went negative
};

// <J^x> = <K^x> - N_FM
double mean_jx(const rotor::Moments& rm, double n_fm);

// Var(J^x) = Var(K^x) - 2(NS - <K^x>) N_FM - N_FM^2
double var_jx(const rotor::Moments& rm, double n_fm, int num_spins, double spin);

// xi_R^2 = N min_perp Var / <J^x>^2 with the transverse minimum taken from
// the rotor 2x2 covariance eigenproblem. Returns +inf once depolarized.
double squeezing(const rotor::Moments& rm, double n_fm, int num_spins);

// C^yy / C^zz arrays over displacements. rotor part of C^yy is <(K^y)^2>/N^2;
// C^zz carries no rotor part (the conserved <(K^z)^2>/N^2 cancels against the
// SW vacuum constant; see docs/correlations.md). Entry 0 holds the on-site term.
void fill_correlations(ObservableRecord& rec, const rotor::Moments& rm,
                       const spinwave::GreenFunctions& green,
                       const lattice::LatticeModel& model);

// Var(J^z) reassembled from the stored correlation arrays (sum-rule route).
double jz_variance_from_correlations(const ObservableRecord& rec, int num_sites);

struct DynamicsOptions {
    bool correlations = false;
    bool entropy = false;
    std::vector<int> entropy_region;  // empty -> half_region default
    int workers = 1;
    double validity_threshold = 0.1;  // N_FM/N above this marks records extrapolated
};

// Full RSW pipeline over a time grid; one record per time, order preserved,
// records computed independently (parallel over time points).
std::vector<ObservableRecord> run_dynamics(const lattice::LatticeModel& model, double inertia,
                                           std::span<const double> times,
                                           const DynamicsOptions& opts = {});

}  // namespace rsw::observables

#endif
