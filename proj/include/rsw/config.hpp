#ifndef RSW_CONFIG_HPP
#define RSW_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

#include "rsw/ed.hpp"
#include "rsw/lattice.hpp"
#include "rsw/rotor.hpp"

namespace rsw::config {

// Invalid configs throw this with every violation collected into one report.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

enum class InertiaMode { Bare, TosScaled, TosExact };

std::string to_string(InertiaMode m);

struct TimeGrid {
    // either an explicit strictly increasing list, or start/stop/step
    std::vector<double> points;

    static TimeGrid uniform(double start, double stop, double step);
};

struct RunConfig {
    lattice::LatticeSpec lattice;
    InertiaMode inertia_mode = InertiaMode::Bare;
    std::optional<rotor::InertiaReference> inertia_reference;
    TimeGrid time_grid;
    bool correlations = false;
    bool entropy = false;
    std::vector<int> entropy_region;  // empty -> default half
    // scan mode
    std::vector<double> scan_alphas;
    std::vector<int> scan_sizes;
    // ed options
    int ed_max_jz = -1;  // full tower
    ed::EvolveMethod ed_method = ed::EvolveMethod::Auto;
    // output
    std::string output_prefix = "run";
    int workers = 1;
};

// Parse + validate a JSON config file. Unknown keys are rejected so the
// echoed config always reproduces the run.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

// Fully resolved config (defaults materialized) for the metadata echo.
std::string echo_json(const RunConfig& cfg);

// Resolve the rotor inertia per the configured mode. TosExact runs the ED
// tower fit on the given model (subject to the ED size cap).
double resolve_inertia(const RunConfig& cfg, const lattice::LatticeModel& model);

}  // namespace rsw::config

#endif
