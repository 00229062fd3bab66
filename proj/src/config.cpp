#include "rsw/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace rsw::config {

using nlohmann::json;

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::ostringstream os;
    os << "invalid config (" << errors.size() << " problem" << (errors.size() == 1 ? "" : "s")
       << "):";
    for (const auto& e : errors) os << "\n  - " << e;
    return os.str();
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& known,
                std::vector<std::string>& errors) {
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) errors.push_back(where + ": unknown key '" + key + "'");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::string to_string(InertiaMode m) {
    switch (m) {
        case InertiaMode::Bare: return "bare";
        case InertiaMode::TosScaled: return "tos-scaled";
        case InertiaMode::TosExact: return "tos-exact";
    }
    return "?";
}

TimeGrid TimeGrid::uniform(double start, double stop, double step) {
    TimeGrid grid;
    if (step <= 0.0 || stop < start) return grid;
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    grid.points.reserve(count);
    for (int k = 0; k < count; ++k) grid.points.push_back(start + k * step);
    return grid;
}

RunConfig parse_config(const std::string& text) {
    std::vector<std::string> errors;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("JSON parse failure: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"top level must be a JSON object"});

    RunConfig cfg;
    check_keys(root,
               "top level",
               {"lattice", "inertia", "time_grid", "observables", "entropy_region", "scan",
                "ed", "output", "workers"},
               errors);

    if (root.contains("lattice")) {
        const auto& lat = root["lattice"];
        check_keys(lat, "lattice",
                   {"dimension", "L", "alpha", "J", "delta", "spin", "distance_convention"},
                   errors);
        try {
            cfg.lattice.dimension = lat.value("dimension", 1);
            cfg.lattice.extent = lat.value("L", 2);
            cfg.lattice.alpha = lat.value("alpha", 3.0);
            cfg.lattice.coupling = lat.value("J", 1.0);
            cfg.lattice.delta = lat.value("delta", 0.0);
            cfg.lattice.spin = lat.value("spin", 0.5);
            cfg.lattice.convention = lattice::convention_from_string(
                lat.value("distance_convention", std::string("minimum-image")));
        } catch (const std::exception& e) {
            errors.push_back(std::string("lattice: ") + e.what());
        }
        try {
            cfg.lattice.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    } else {
        errors.push_back("missing required section 'lattice'");
    }

    if (root.contains("inertia")) {
        const auto& ine = root["inertia"];
        check_keys(ine, "inertia", {"mode", "reference"}, errors);
        const std::string mode = ine.value("mode", std::string("bare"));
        if (mode == "bare")
            cfg.inertia_mode = InertiaMode::Bare;
        else if (mode == "tos-scaled")
            cfg.inertia_mode = InertiaMode::TosScaled;
        else if (mode == "tos-exact")
            cfg.inertia_mode = InertiaMode::TosExact;
        else
            errors.push_back("inertia.mode must be bare | tos-scaled | tos-exact");
        if (ine.contains("reference")) {
            const auto& ref = ine["reference"];
            check_keys(ref, "inertia.reference", {"N_ref", "J0_ref", "I_tos_ref"}, errors);
            rotor::InertiaReference r;
            r.n_ref = ref.value("N_ref", 0);
            r.j0_ref = ref.value("J0_ref", 0.0);
            r.i_tos_ref = ref.value("I_tos_ref", 0.0);
            if (r.n_ref < 2 || r.j0_ref <= 0.0 || r.i_tos_ref == 0.0)
                errors.push_back("inertia.reference requires N_ref >= 2, J0_ref > 0, I_tos_ref != 0");
            cfg.inertia_reference = r;
        }
        if (cfg.inertia_mode == InertiaMode::TosScaled && !cfg.inertia_reference)
            errors.push_back("inertia.mode tos-scaled requires inertia.reference");
    }

    if (root.contains("time_grid")) {
        const auto& tg = root["time_grid"];
        check_keys(tg, "time_grid", {"start", "stop", "step", "points"}, errors);
        if (tg.contains("points")) {
            for (const auto& p : tg["points"]) cfg.time_grid.points.push_back(p.get<double>());
            for (size_t k = 1; k < cfg.time_grid.points.size(); ++k)
                if (cfg.time_grid.points[k] <= cfg.time_grid.points[k - 1]) {
                    errors.push_back("time_grid.points must be strictly increasing");
                    break;
                }
        } else {
            const double start = tg.value("start", 0.0);
            const double stop = tg.value("stop", -1.0);
            const double step = tg.value("step", 0.0);
            if (step <= 0.0 || stop < start)
                errors.push_back("time_grid requires step > 0 and stop >= start");
            else
                cfg.time_grid = TimeGrid::uniform(start, stop, step);
        }
    }

    if (root.contains("observables")) {
        const auto& obs = root["observables"];
        check_keys(obs, "observables", {"correlations", "entropy"}, errors);
        cfg.correlations = obs.value("correlations", false);
        cfg.entropy = obs.value("entropy", false);
    }

    if (root.contains("entropy_region")) {
        const auto& er = root["entropy_region"];
        check_keys(er, "entropy_region", {"type", "sites"}, errors);
        const std::string type = er.value("type", std::string("half"));
        if (type == "half") {
            // default region, resolved at run time
        } else if (type == "sites" && er.contains("sites")) {
            for (const auto& s : er["sites"]) cfg.entropy_region.push_back(s.get<int>());
            const int n = cfg.lattice.sites();
            for (int s : cfg.entropy_region)
                if (s < 0 || s >= n) {
                    errors.push_back("entropy_region.sites out of range");
                    break;
                }
            if (!cfg.entropy_region.empty() &&
                static_cast<int>(cfg.entropy_region.size()) >= n)
                errors.push_back("entropy_region must be a strict subsystem");
        } else {
            errors.push_back("entropy_region.type must be 'half' or 'sites' (with a site list)");
        }
    }

    if (root.contains("scan")) {
        const auto& sc = root["scan"];
        check_keys(sc, "scan", {"alphas", "sizes"}, errors);
        if (sc.contains("alphas"))
            for (const auto& a : sc["alphas"]) cfg.scan_alphas.push_back(a.get<double>());
        if (sc.contains("sizes"))
            for (const auto& s : sc["sizes"]) cfg.scan_sizes.push_back(s.get<int>());
        for (double a : cfg.scan_alphas)
            if (a < 0.0) {
                errors.push_back("scan.alphas must be >= 0");
                break;
            }
        for (int s : cfg.scan_sizes)
            if (s < 2) {
                errors.push_back("scan.sizes must be >= 2");
                break;
            }
    }

    if (root.contains("ed")) {
        const auto& ed = root["ed"];
        check_keys(ed, "ed", {"max_jz", "method"}, errors);
        cfg.ed_max_jz = ed.value("max_jz", -1);
        const std::string method = ed.value("method", std::string("auto"));
        if (method == "auto")
            cfg.ed_method = ed::EvolveMethod::Auto;
        else if (method == "full-diag")
            cfg.ed_method = ed::EvolveMethod::FullDiag;
        else if (method == "krylov")
            cfg.ed_method = ed::EvolveMethod::Krylov;
        else
            errors.push_back("ed.method must be auto | full-diag | krylov");
    }

    if (root.contains("output")) {
        const auto& out = root["output"];
        check_keys(out, "output", {"prefix"}, errors);
        cfg.output_prefix = out.value("prefix", std::string("run"));
        if (cfg.output_prefix.empty() || cfg.output_prefix.find('/') != std::string::npos)
            errors.push_back("output.prefix must be a nonempty file-name stem");
    }

    cfg.workers = root.value("workers", 1);
    if (cfg.workers < 1) errors.push_back("workers must be >= 1");

    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string echo_json(const RunConfig& cfg) {
    json j;
    j["lattice"] = {{"dimension", cfg.lattice.dimension},
                    {"L", cfg.lattice.extent},
                    {"alpha", cfg.lattice.alpha},
                    {"J", cfg.lattice.coupling},
                    {"delta", cfg.lattice.delta},
                    {"spin", cfg.lattice.spin},
                    {"distance_convention", lattice::to_string(cfg.lattice.convention)}};
    j["inertia"] = {{"mode", to_string(cfg.inertia_mode)}};
    if (cfg.inertia_reference)
        j["inertia"]["reference"] = {{"N_ref", cfg.inertia_reference->n_ref},
                                     {"J0_ref", cfg.inertia_reference->j0_ref},
                                     {"I_tos_ref", cfg.inertia_reference->i_tos_ref}};
    j["time_grid"] = {{"points", cfg.time_grid.points}};
    j["observables"] = {{"correlations", cfg.correlations}, {"entropy", cfg.entropy}};
    if (cfg.entropy_region.empty())
        j["entropy_region"] = {{"type", "half"}};
    else
        j["entropy_region"] = {{"type", "sites"}, {"sites", cfg.entropy_region}};
    if (!cfg.scan_alphas.empty() || !cfg.scan_sizes.empty())
        j["scan"] = {{"alphas", cfg.scan_alphas}, {"sizes", cfg.scan_sizes}};
    j["ed"] = {{"max_jz", cfg.ed_max_jz},
               {"method", cfg.ed_method == ed::EvolveMethod::Auto        ? "auto"
                          : cfg.ed_method == ed::EvolveMethod::FullDiag ? "full-diag"
                                                                        : "krylov"}};
    j["output"] = {{"prefix", cfg.output_prefix}};
    j["workers"] = cfg.workers;
    return j.dump(2);
}

double resolve_inertia(const RunConfig& cfg, const lattice::LatticeModel& model) {
    switch (cfg.inertia_mode) {
        case InertiaMode::Bare: return rotor::bare_inertia(model);
        case InertiaMode::TosScaled: return rotor::tos_inertia(model, cfg.inertia_reference);
        case InertiaMode::TosExact: {
            const auto fit = ed::fit_tower(model, cfg.ed_max_jz, cfg.workers);
            return fit.i_tos;
        }
    }
    throw std::logic_error("unreachable inertia mode");
}

}  // namespace rsw::config
