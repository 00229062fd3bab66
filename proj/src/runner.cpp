#include "rsw/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "rsw/ed.hpp"
#include "rsw/entropy.hpp"

namespace rsw::runner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

// fixed shortest-roundtrip formatting so reruns are bit-identical
std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw config::ConfigError({"cannot write output file: " + path.string()});
    return out;
}

void write_meta(const fs::path& path, const std::string& command,
                const config::RunConfig& cfg, const std::vector<std::string>& files,
                json extra = json::object()) {
    json meta;
    meta["command"] = command;
    meta["version"] = kVersion;
    meta["schema_version"] = kSchemaVersion;
    meta["config"] = json::parse(config::echo_json(cfg));
    meta["conventions"] = {{"energy_unit", "J"},
                           {"time_unit", "1/J"},
                           {"momentum_order", "row-major, q=0 first"},
                           {"vacuum_symplectic_eigenvalue", 0.5},
                           {"entropy_log_base", "e"}};
    for (auto& [k, v] : extra.items()) meta[k] = v;
    meta["files"] = files;
    auto out = open_out(path);
    out << meta.dump(2) << "\n";
}

void write_series_csv(const fs::path& path,
                      const std::vector<observables::ObservableRecord>& records) {
    auto out = open_out(path);
    out << "t,kx_mean,jx_mean,kx_var,jx_var,var_perp_min,xi2,n0_frac,nfm_frac,"
           "jz_mean,jz_var,s2_rotor,s2_sw,s2_total,rsw_valid,var_negative\n";
    for (const auto& r : records) {
        out << num(r.t) << ',' << num(r.kx_mean) << ',' << num(r.jx_mean) << ','
            << num(r.kx_var) << ',' << num(r.jx_var) << ',' << num(r.var_perp_min) << ','
            << num(r.xi2) << ',' << num(r.n0_frac) << ',' << num(r.nfm_frac) << ','
            << num(r.jz_mean) << ',' << num(r.jz_var) << ',' << num(r.s2_rotor) << ','
            << num(r.s2_sw) << ',' << num(r.s2_total) << ',' << (r.rsw_valid ? 1 : 0) << ','
            << (r.var_negative ? 1 : 0) << '\n';
    }
}

void write_correlations_csv(const fs::path& path, const lattice::LatticeModel& model,
                            const std::vector<observables::ObservableRecord>& records) {
    auto out = open_out(path);
    out << "t,dx,dy,cyy_rotor,cyy_sw,cyy,czz_sw,czz\n";
    for (const auto& r : records) {
        if (r.cyy.empty()) continue;
        for (int d = 0; d < model.num_sites; ++d) {
            const auto c = model.coords(d);
            out << num(r.t) << ',' << c[0] << ',' << c[1] << ',' << num(r.cyy[d].rotor) << ','
                << num(r.cyy[d].sw) << ',' << num(r.cyy[d].total) << ',' << num(r.czz[d].sw)
                << ',' << num(r.czz[d].total) << '\n';
        }
    }
}

void parallel_cells(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

ScanCell scan_cell(double alpha, int num_spins, const lattice::LatticeSpec& base) {
    lattice::LatticeSpec spec = base;
    spec.dimension = 1;
    spec.extent = num_spins;
    spec.alpha = alpha;
    const auto model = lattice::build_model(spec);
    const double inertia = rotor::bare_inertia(model);
    const auto initial = rotor::css_x_state(model.num_sites, spec.spin);
    const auto coeffs = spinwave::coefficients(model);
    const int n = model.num_sites;

    auto eval = [&](double t) {
        const auto state = rotor::evolve(initial, inertia, t);
        const auto rm = rotor::moments(state);
        const auto modes = spinwave::evolve_modes(coeffs, t);
        const double n_fm = spinwave::total_fm_population(modes);
        const double jx = observables::mean_jx(rm, n_fm);
        const double xi2 = observables::squeezing(rm, n_fm, n);
        return std::pair<double, double>(xi2, jx);
    };

    // coarse geometric grid up to the cat time, truncated at depolarization
    const double t_max = pi * std::abs(inertia);
    const int coarse = 400;
    std::vector<double> ts(coarse);
    const double t_lo = 1e-3;
    for (int k = 0; k < coarse; ++k)
        ts[k] = t_lo * std::pow(t_max / t_lo, static_cast<double>(k) / (coarse - 1));

    ScanCell cell;
    cell.alpha = alpha;
    cell.num_spins = num_spins;
    cell.inertia = inertia;
    double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
    int best_k = -1, last_valid = -1;
    for (int k = 0; k < coarse; ++k) {
        const auto [xi2, jx] = eval(ts[k]);
        if (jx <= 0.0) break;  // additive depolarization; beyond is unphysical
        last_valid = k;
        if (xi2 < best) {
            best = xi2;
            best_t = ts[k];
            best_k = k;
        }
    }
    if (best_k < 0) {
        cell.depolarized = true;
        cell.min_xi2 = observables::depolarized_sentinel;
        return cell;
    }
    cell.depolarized = (best_k == last_valid);
    // golden-section refinement inside the bracketing interval
    if (!cell.depolarized && best_k > 0) {
        double a = ts[best_k - 1];
        double b = ts[std::min(best_k + 1, last_valid)];
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = eval(c).first, fd = eval(d).first;
        for (int it = 0; it < 60 && (b - a) > 1e-10 * b; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = eval(c).first;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = eval(d).first;
            }
        }
        const double tm = 0.5 * (a + b);
        const double fm = eval(tm).first;
        if (fm < best) {
            best = fm;
            best_t = tm;
        }
    }
    cell.min_xi2 = best;
    cell.t_min = best_t;
    return cell;
}

std::vector<ScanSlope> fit_slopes(const std::vector<ScanCell>& cells) {
    std::vector<double> alphas;
    for (const auto& c : cells)
        if (alphas.empty() || std::abs(alphas.back() - c.alpha) > 1e-12)
            if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end())
                alphas.push_back(c.alpha);
    std::vector<ScanSlope> out;
    for (double a : alphas) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& c : cells) {
            if (c.alpha != a || c.depolarized || !std::isfinite(c.min_xi2)) continue;
            const double x = std::log(static_cast<double>(c.num_spins));
            const double y = std::log(c.min_xi2);
            sw += 1;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        if (sw < 2) continue;
        const double det = sw * sxx - sx * sx;
        ScanSlope sl;
        sl.alpha = a;
        sl.slope = (sw * sxy - sx * sy) / det;
        sl.intercept = (sxx * sy - sx * sxy) / det;
        out.push_back(sl);
    }
    return out;
}

std::vector<CompareRow> oracle_compare(const config::RunConfig& cfg) {
    if (cfg.time_grid.points.empty())
        throw config::ConfigError({"oracle-compare requires a time_grid"});
    const auto model = lattice::build_model(cfg.lattice);
    if (model.num_sites > ed::max_sites)
        throw config::ConfigError({"oracle-compare requires N <= " +
                                   std::to_string(ed::max_sites)});
    const double inertia = config::resolve_inertia(cfg, model);

    observables::DynamicsOptions opts;
    opts.correlations = cfg.correlations;
    opts.entropy = cfg.entropy;
    opts.entropy_region = cfg.entropy_region;
    opts.workers = cfg.workers;
    const auto rsw_records =
        observables::run_dynamics(model, inertia, cfg.time_grid.points, opts);

    ed::SectorHamiltonian ham(model);
    ed::Evolver evolver(ham, cfg.ed_method, cfg.workers);
    ed::EDObservablesOptions ed_opts;
    ed_opts.correlations = cfg.correlations;
    ed_opts.entropy = cfg.entropy;
    ed_opts.entropy_region = cfg.entropy_region;

    std::vector<CompareRow> rows(cfg.time_grid.points.size());
    auto state = ed::css_x_state(model.num_sites);
    double t_prev = 0.0;
    for (size_t k = 0; k < cfg.time_grid.points.size(); ++k) {
        const double t = cfg.time_grid.points[k];
        state = evolver.evolve(state, t - t_prev);
        t_prev = t;
        CompareRow row;
        row.t = t;
        row.rsw = rsw_records[k];
        row.ed = ed::exact_observables(state, model, ed_opts);
        row.ed.t = t;
        row.dev_jx = std::abs(row.rsw.jx_mean - row.ed.jx_mean) /
                     std::max(std::abs(row.ed.jx_mean), 1e-12);
        if (std::isfinite(row.rsw.xi2) && std::isfinite(row.ed.xi2))
            row.dev_xi2 = std::abs(row.rsw.xi2 - row.ed.xi2) / std::max(row.ed.xi2, 1e-12);
        else
            row.dev_xi2 = std::numeric_limits<double>::infinity();
        rows[k] = std::move(row);
    }
    return rows;
}

std::vector<std::string> cmd_dynamics(const config::RunConfig& cfg,
                                      const std::string& out_dir) {
    if (cfg.time_grid.points.empty())
        throw config::ConfigError({"dynamics requires a time_grid"});
    fs::create_directories(out_dir);
    const auto model = lattice::build_model(cfg.lattice);
    const double inertia = config::resolve_inertia(cfg, model);

    observables::DynamicsOptions opts;
    opts.correlations = cfg.correlations;
    opts.entropy = cfg.entropy;
    opts.entropy_region = cfg.entropy_region;
    opts.workers = cfg.workers;
    const auto records = observables::run_dynamics(model, inertia, cfg.time_grid.points, opts);

    std::vector<std::string> files;
    const fs::path dir(out_dir);
    const std::string series = cfg.output_prefix + "_series.csv";
    write_series_csv(dir / series, records);
    files.push_back(series);
    if (cfg.correlations) {
        const std::string corr = cfg.output_prefix + "_correlations.csv";
        write_correlations_csv(dir / corr, model, records);
        files.push_back(corr);
    }
    const std::string meta = cfg.output_prefix + "_meta.json";
    write_meta(dir / meta, "dynamics", cfg, files,
               {{"inertia", inertia}, {"J0", model.j0}, {"N", model.num_sites}});
    files.push_back(meta);
    return files;
}

std::vector<std::string> cmd_scan(const config::RunConfig& cfg, const std::string& out_dir) {
    std::vector<std::string> problems;
    if (cfg.scan_alphas.empty()) problems.push_back("scan requires scan.alphas");
    if (cfg.scan_sizes.empty()) problems.push_back("scan requires scan.sizes");
    if (cfg.lattice.dimension != 1) problems.push_back("scan mode runs on 1d lattices");
    if (!problems.empty()) throw config::ConfigError(problems);
    fs::create_directories(out_dir);

    std::vector<ScanCell> cells(cfg.scan_alphas.size() * cfg.scan_sizes.size());
    parallel_cells(static_cast<int>(cells.size()), cfg.workers, [&](int idx) {
        const double alpha = cfg.scan_alphas[idx / cfg.scan_sizes.size()];
        const int n = cfg.scan_sizes[idx % cfg.scan_sizes.size()];
        cells[idx] = scan_cell(alpha, n, cfg.lattice);
    });
    const auto slopes = fit_slopes(cells);

    std::vector<std::string> files;
    const fs::path dir(out_dir);
    const std::string scan_name = cfg.output_prefix + "_scan.csv";
    {
        auto out = open_out(dir / scan_name);
        out << "alpha,N,min_xi2,t_min,inertia,depolarized\n";
        for (const auto& c : cells)
            out << num(c.alpha) << ',' << c.num_spins << ',' << num(c.min_xi2) << ','
                << num(c.t_min) << ',' << num(c.inertia) << ',' << (c.depolarized ? 1 : 0)
                << '\n';
    }
    files.push_back(scan_name);
    const std::string slopes_name = cfg.output_prefix + "_slopes.csv";
    {
        auto out = open_out(dir / slopes_name);
        out << "alpha,slope,intercept\n";
        for (const auto& s : slopes)
            out << num(s.alpha) << ',' << num(s.slope) << ',' << num(s.intercept) << '\n';
    }
    files.push_back(slopes_name);
    const std::string meta = cfg.output_prefix + "_meta.json";
    write_meta(dir / meta, "scan", cfg, files);
    files.push_back(meta);
    return files;
}

std::vector<std::string> cmd_tos(const config::RunConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto model = lattice::build_model(cfg.lattice);
    if (model.num_sites > ed::max_sites)
        throw config::ConfigError({"tos requires N <= " + std::to_string(ed::max_sites)});
    const auto fit = ed::fit_tower(model, cfg.ed_max_jz, cfg.workers);
    const double i_bare = rotor::bare_inertia(model);

    json j;
    j["N"] = model.num_sites;
    j["J0"] = model.j0;
    j["E0"] = fit.e0;
    j["I_tos"] = fit.i_tos;
    j["I_bare"] = i_bare;
    j["gamma"] = fit.i_tos / i_bare;
    j["rel_residual"] = fit.rel_residual;
    j["quadratic"] = fit.quadratic;
    j["jz"] = fit.jz_values;
    j["sector_energies"] = fit.sector_energies;
    j["reference"] = {{"N_ref", model.num_sites}, {"J0_ref", model.j0}, {"I_tos_ref", fit.i_tos}};

    std::vector<std::string> files;
    const fs::path dir(out_dir);
    const std::string tos_name = cfg.output_prefix + "_tos.json";
    {
        auto out = open_out(dir / tos_name);
        out << j.dump(2) << "\n";
    }
    files.push_back(tos_name);
    const std::string meta = cfg.output_prefix + "_meta.json";
    write_meta(dir / meta, "tos", cfg, files);
    files.push_back(meta);
    return files;
}

std::vector<std::string> cmd_oracle_compare(const config::RunConfig& cfg,
                                            const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto rows = oracle_compare(cfg);

    std::vector<std::string> files;
    const fs::path dir(out_dir);
    const std::string cmp_name = cfg.output_prefix + "_compare.csv";
    {
        auto out = open_out(dir / cmp_name);
        out << "t,jx_rsw,jx_ed,dev_jx,xi2_rsw,xi2_ed,dev_xi2,var_jx_rsw,var_jx_ed,"
               "jz_var_ed,s2_rsw,s2_ed\n";
        for (const auto& r : rows)
            out << num(r.t) << ',' << num(r.rsw.jx_mean) << ',' << num(r.ed.jx_mean) << ','
                << num(r.dev_jx) << ',' << num(r.rsw.xi2) << ',' << num(r.ed.xi2) << ','
                << num(r.dev_xi2) << ',' << num(r.rsw.jx_var) << ',' << num(r.ed.jx_var)
                << ',' << num(r.ed.jz_var) << ',' << num(r.rsw.s2_total) << ','
                << num(r.ed.s2_total) << '\n';
    }
    files.push_back(cmp_name);
    const std::string meta = cfg.output_prefix + "_meta.json";
    write_meta(dir / meta, "oracle-compare", cfg, files);
    files.push_back(meta);
    return files;
}

}  // namespace rsw::runner
