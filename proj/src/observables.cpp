#include "rsw/observables.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "rsw/entropy.hpp"

namespace rsw::observables {

double mean_jx(const rotor::Moments& rm, double n_fm) { return rm.kx - n_fm; }

double var_jx(const rotor::Moments& rm, double n_fm, int num_spins, double spin) {
    const double ns = num_spins * spin;
    return rm.var_kx() - 2.0 * (ns - rm.kx) * n_fm - n_fm * n_fm;
}

double squeezing(const rotor::Moments& rm, double n_fm, int num_spins) {
    const double jx = rm.kx - n_fm;
    const double ns = num_spins * 0.5;  // scale only used for the sentinel cutoff
    if (std::abs(jx) < 1e-9 * std::max(1.0, ns)) return depolarized_sentinel;
    return num_spins * rm.min_perp_variance() / (jx * jx);
}

void fill_correlations(ObservableRecord& rec, const rotor::Moments& rm,
                       const spinwave::GreenFunctions& green,
                       const lattice::LatticeModel& model) {
    const int n = model.num_sites;
    const double s = model.spec.spin;
    const double ky2_rotor = rm.ky2 / (static_cast<double>(n) * n);
    const double vac = s / (2.0 * n);
    rec.cyy.resize(n);
    rec.czz.resize(n);
    for (int d = 0; d < n; ++d) {
        const double g = green.g[d];
        const double ref = green.f[d].real();
        // on-site terms carry the extra commutator delta, S/2
        const double onsite = (d == 0) ? s / 2.0 : 0.0;
        CorrEntry yy;
        yy.rotor = ky2_rotor;
        yy.sw = s * (g + ref) - vac + onsite;
        yy.total = yy.rotor + yy.sw;
        rec.cyy[d] = yy;
        CorrEntry zz;
        // the conserved rotor part <(K^z)^2>/N^2 = S/(2N) cancels the SW
        // vacuum constant exactly; only the SW structure remains.
        zz.rotor = 0.0;
        zz.sw = s * (g - ref) + onsite;
        zz.total = zz.sw;
        rec.czz[d] = zz;
    }
}

double jz_variance_from_correlations(const ObservableRecord& rec, int num_sites) {
    KahanSum acc;
    for (const auto& e : rec.czz) acc.add(e.total);
    return num_sites * acc.value();
}

namespace {

// deterministic parallel map over an index range; results land by index
void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
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
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<ObservableRecord> run_dynamics(const lattice::LatticeModel& model, double inertia,
                                           std::span<const double> times,
                                           const DynamicsOptions& opts) {
    const int n = model.num_sites;
    const double s = model.spec.spin;
    const double ns = n * s;
    const auto initial = rotor::css_x_state(n, s);
    const auto coeffs = spinwave::coefficients(model);
    std::vector<int> region = opts.entropy_region;
    if (opts.entropy && region.empty()) region = entropy::half_region(model.spec);
    const bool need_green = opts.correlations || opts.entropy;

    std::vector<ObservableRecord> records(times.size());
    parallel_for(static_cast<int>(times.size()), opts.workers, [&](int i) {
        const double t = times[i];
        ObservableRecord rec;
        rec.t = t;
        const auto state = rotor::evolve(initial, inertia, t);
        const auto rm = rotor::moments(state);
        const auto modes = spinwave::evolve_modes(coeffs, t);
        const double n_fm = spinwave::total_fm_population(modes);

        rec.kx_mean = rm.kx;
        rec.kx_var = rm.var_kx();
        rec.jx_mean = mean_jx(rm, n_fm);
        rec.jx_var = var_jx(rm, n_fm, n, s);
        rec.var_perp_min = rm.min_perp_variance();
        rec.xi2 = squeezing(rm, n_fm, n);
        rec.n0_frac = (ns - rm.kx) / n;
        rec.nfm_frac = n_fm / n;
        rec.jz_mean = rm.kz;
        rec.var_negative = rec.jx_var < -1e-10 * ns * ns;  // beyond roundoff of the additive combination
        rec.rsw_valid = rec.nfm_frac <= opts.validity_threshold;

        if (need_green) {
            const auto green = spinwave::realspace_green(modes, model);
            fill_correlations(rec, rm, green, model);
            rec.jz_var = jz_variance_from_correlations(rec, n);
            if (opts.entropy) {
                rec.s2_rotor = entropy::renyi2_rotor(state, static_cast<int>(region.size()));
                rec.s2_sw = entropy::renyi2_sw(green, model, region);
                rec.s2_total = rec.s2_rotor + rec.s2_sw;
            }
            if (!opts.correlations) {
                rec.cyy.clear();
                rec.czz.clear();
            }
        } else {
            // the SW contribution to Var(J^z) sums to zero exactly (the
            // q != 0 transforms carry no q = 0 weight), leaving the
            // conserved rotor <(K^z)^2>.
            rec.jz_var = rm.kz2 - rm.kz * rm.kz;
        }
        records[i] = std::move(rec);
    });
    return records;
}

}  // namespace rsw::observables
