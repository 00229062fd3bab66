#include "rsw/ed.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "rsw/entropy.hpp"

namespace rsw::ed {

namespace {

void parallel_sectors(int count, int workers, const std::function<void(int)>& fn) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
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

SectorHamiltonian::SectorHamiltonian(const lattice::LatticeModel& model) {
    n_ = model.num_sites;
    if (n_ > max_sites)
        throw std::invalid_argument("ED supports at most " + std::to_string(max_sites) +
                                    " sites");
    if (model.spec.spin != 0.5)
        throw std::invalid_argument("ED oracle supports S = 1/2 only");
    delta_ = model.spec.delta;

    double abs_sum = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) {
            const double jij = model.couplings(i, j);
            if (jij == 0.0) continue;
            pairs_.push_back({(1u << i) | (1u << j), jij / 2.0, jij * delta_ / 4.0});
            abs_sum += std::abs(jij);
        }
    norm_bound_ = 0.5 * abs_sum + 0.25 * std::abs(delta_) * abs_sum;

    const uint32_t dim = 1u << n_;
    bases_.resize(n_ + 1);
    index_.assign(dim, -1);
    diag_.assign(dim, 0.0);
    for (uint32_t s = 0; s < dim; ++s) {
        const int nup = std::popcount(s);
        index_[s] = static_cast<int32_t>(bases_[nup].size());
        bases_[nup].push_back(s);
        double d = 0.0;
        for (const auto& p : pairs_) {
            // z_i z_j = +1/4 if bits agree, -1/4 otherwise
            const uint32_t bits = s & p.mask;
            const bool agree = bits == 0 || bits == p.mask;
            d += agree ? -p.quarter_d : p.quarter_d;
        }
        diag_[s] = d;
    }
}

template <typename Scalar>
void SectorHamiltonian::apply_impl(int n_up, std::span<const Scalar> in,
                                   std::span<Scalar> out) const {
    const auto& basis = bases_[n_up];
    const size_t dim = basis.size();
    for (size_t k = 0; k < dim; ++k) out[k] = diag_[basis[k]] * in[k];
    for (size_t k = 0; k < dim; ++k) {
        const uint32_t s = basis[k];
        const Scalar amp = in[k];
        if (amp == Scalar{}) continue;
        for (const auto& p : pairs_) {
            const uint32_t bits = s & p.mask;
            if (bits == 0 || bits == p.mask) continue;  // z-aligned, no flip
            out[index_[s ^ p.mask]] += -p.half_j * amp;
        }
    }
}

void SectorHamiltonian::apply(int n_up, std::span<const complex> in,
                              std::span<complex> out) const {
    apply_impl<complex>(n_up, in, out);
}

void SectorHamiltonian::apply(int n_up, std::span<const double> in,
                              std::span<double> out) const {
    apply_impl<double>(n_up, in, out);
}

Eigen::MatrixXd SectorHamiltonian::dense(int n_up) const {
    const int dim = sector_dim(n_up);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> unit(dim, 0.0), col(dim, 0.0);
    for (int c = 0; c < dim; ++c) {
        std::fill(unit.begin(), unit.end(), 0.0);
        unit[c] = 1.0;
        std::fill(col.begin(), col.end(), 0.0);
        apply(n_up, std::span<const double>(unit), std::span<double>(col));
        for (int r = 0; r < dim; ++r) h(r, c) = col[r];
    }
    return h;
}

double EDState::norm2() const {
    KahanSum acc;
    for (const auto& a : amp) acc.add(std::norm(a));
    return acc.value();
}

std::vector<double> EDState::sector_norms(const SectorHamiltonian& ham) const {
    std::vector<KahanSum> acc(ham.num_sectors());
    for (uint32_t s = 0; s < amp.size(); ++s)
        acc[std::popcount(s)].add(std::norm(amp[s]));
    std::vector<double> out(acc.size());
    for (size_t k = 0; k < acc.size(); ++k) out[k] = acc[k].value();
    return out;
}

EDState css_x_state(int num_sites) {
    if (num_sites < 2 || num_sites > max_sites)
        throw std::invalid_argument("css_x_state: N out of range");
    EDState st;
    st.num_sites = num_sites;
    st.amp.assign(1u << num_sites, complex(std::pow(2.0, -num_sites / 2.0), 0.0));
    return st;
}

Evolver::Evolver(const SectorHamiltonian& ham, EvolveMethod method, int workers,
                 int krylov_dim)
    : ham_(ham), method_(method), workers_(workers), krylov_dim_(krylov_dim) {
    if (method_ == EvolveMethod::Auto)
        method_ = ham.num_sites() <= 12 ? EvolveMethod::FullDiag : EvolveMethod::Krylov;
    if (method_ == EvolveMethod::FullDiag && ham.num_sites() > 14)
        throw std::invalid_argument("full diagonalization limited to N <= 14");
}

void Evolver::evolve_sector_full(int n_up, std::vector<complex>& amp, double t) const {
    const int dim = ham_.sector_dim(n_up);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham_.dense(n_up));
    Eigen::VectorXcd v(dim);
    for (int k = 0; k < dim; ++k) v(k) = amp[k];
    Eigen::VectorXcd coeff = es.eigenvectors().transpose() * v;
    for (int k = 0; k < dim; ++k)
        coeff(k) *= std::polar(1.0, -es.eigenvalues()(k) * t);
    v = es.eigenvectors() * coeff;
    for (int k = 0; k < dim; ++k) amp[k] = v(k);
}

void Evolver::evolve_sector_krylov(int n_up, std::vector<complex>& amp, double t) const {
    const int dim = ham_.sector_dim(n_up);
    const int m_max = std::min(krylov_dim_, dim);
    // substep sized so that ||H|| h <= 1; with m ~ 30 the local truncation
    // error ~ 1/m! is far below roundoff
    const double h_max = 1.0 / std::max(ham_.norm_bound(), 1e-12);
    double remaining = t;
    std::vector<std::vector<complex>> v;  // Lanczos basis
    std::vector<complex> w(dim);
    while (remaining > 0.0) {
        const double h = std::min(remaining, h_max);
        remaining -= h;
        double beta0 = 0.0;
        for (const auto& a : amp) beta0 += std::norm(a);
        beta0 = std::sqrt(beta0);
        if (beta0 < 1e-300) return;  // empty sector

        v.assign(1, amp);
        for (auto& x : v[0]) x /= beta0;
        std::vector<double> alpha, beta;
        int m = m_max;
        for (int k = 0; k < m_max; ++k) {
            ham_.apply(n_up, std::span<const complex>(v[k]), std::span<complex>(w));
            if (k > 0)
                for (int i = 0; i < dim; ++i) w[i] -= beta[k - 1] * v[k - 1][i];
            complex a{};
            for (int i = 0; i < dim; ++i) a += std::conj(v[k][i]) * w[i];
            alpha.push_back(a.real());
            for (int i = 0; i < dim; ++i) w[i] -= alpha[k] * v[k][i];
            // full reorthogonalization
            for (const auto& vk : v) {
                complex c{};
                for (int i = 0; i < dim; ++i) c += std::conj(vk[i]) * w[i];
                for (int i = 0; i < dim; ++i) w[i] -= c * vk[i];
            }
            double nb = 0.0;
            for (const auto& x : w) nb += std::norm(x);
            nb = std::sqrt(nb);
            if (k + 1 == m_max || nb < 1e-12) {
                m = k + 1;
                break;
            }
            beta.push_back(nb);
            v.push_back(w);
            for (auto& x : v.back()) x /= nb;
        }
        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) {
            tmat(k, k) = alpha[k];
            if (k + 1 < m) tmat(k, k + 1) = tmat(k + 1, k) = beta[k];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
        Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
        e1(0) = 1.0;
        Eigen::VectorXcd y = es.eigenvectors().transpose() * e1;
        for (int k = 0; k < m; ++k) y(k) *= std::polar(1.0, -es.eigenvalues()(k) * h);
        y = es.eigenvectors() * y;
        std::fill(amp.begin(), amp.end(), complex{});
        for (int k = 0; k < m; ++k) {
            const complex c = beta0 * y(k);
            for (int i = 0; i < dim; ++i) amp[i] += c * v[k][i];
        }
    }
}

EDState Evolver::evolve(const EDState& state, double t) const {
    EDState out = state;
    out.time = state.time + t;
    if (t == 0.0) return out;
    parallel_sectors(ham_.num_sectors(), workers_, [&](int n_up) {
        const auto& basis = ham_.basis(n_up);
        std::vector<complex> amp(basis.size());
        for (size_t k = 0; k < basis.size(); ++k) amp[k] = state.amp[basis[k]];
        if (method_ == EvolveMethod::FullDiag)
            evolve_sector_full(n_up, amp, t);
        else
            evolve_sector_krylov(n_up, amp, t);
        for (size_t k = 0; k < basis.size(); ++k) out.amp[basis[k]] = amp[k];
    });
    return out;
}

EDState evolve_exact(const EDState& state, const SectorHamiltonian& ham, double t,
                     EvolveMethod method, int workers) {
    return Evolver(ham, method, workers).evolve(state, t);
}

namespace {

struct CollectiveMoments {
    double jx, jy, jz, jx2, jy2, jz2, yz_sym;
};

CollectiveMoments collective_moments(const EDState& state) {
    const int n = state.num_sites;
    const uint32_t dim = 1u << n;
    const auto& psi = state.amp;
    std::vector<complex> phip(dim), phim(dim), phiz(dim);
    for (uint32_t s = 0; s < dim; ++s) {
        const double mz = std::popcount(s) - n / 2.0;
        phiz[s] = mz * psi[s];
    }
    for (int i = 0; i < n; ++i) {
        const uint32_t mi = 1u << i;
        for (uint32_t s = 0; s < dim; ++s) {
            if (s & mi)
                phim[s ^ mi] += psi[s];
            else
                phip[s | mi] += psi[s];
        }
    }
    auto dot = [&](const std::vector<complex>& a, const std::vector<complex>& b) {
        complex acc{};
        for (uint32_t s = 0; s < dim; ++s) acc += std::conj(a[s]) * b[s];
        return acc;
    };
    const complex jp = dot(psi, phip);
    const complex jpp = dot(phim, phip);
    const double jpm = dot(phim, phim).real();
    const double jmp = dot(phip, phip).real();
    CollectiveMoments out{};
    out.jx = jp.real();
    out.jy = jp.imag();
    out.jz = dot(psi, phiz).real();
    out.jx2 = 0.25 * (2.0 * jpp.real() + jpm + jmp);
    out.jy2 = -0.25 * (2.0 * jpp.real() - jpm - jmp);
    out.jz2 = dot(phiz, phiz).real();
    const complex x = dot(phim, phiz) + dot(phiz, phip);
    out.yz_sym = 0.5 * x.imag();
    return out;
}

double renyi2_region(const EDState& state, std::span<const int> region) {
    const int n = state.num_sites;
    const int na = static_cast<int>(region.size());
    const int nb = n - na;
    std::vector<int> bsites;
    std::vector<bool> in_a(n, false);
    for (int s : region) in_a[s] = true;
    for (int s = 0; s < n; ++s)
        if (!in_a[s]) bsites.push_back(s);

    const uint32_t da = 1u << na, db = 1u << nb;
    std::vector<uint32_t> scatter_a(da, 0), scatter_b(db, 0);
    for (uint32_t a = 0; a < da; ++a) {
        uint32_t s = 0;
        for (int k = 0; k < na; ++k)
            if (a & (1u << k)) s |= 1u << region[k];
        scatter_a[a] = s;
    }
    for (uint32_t b = 0; b < db; ++b) {
        uint32_t s = 0;
        for (int k = 0; k < nb; ++k)
            if (b & (1u << k)) s |= 1u << bsites[k];
        scatter_b[b] = s;
    }
    Eigen::MatrixXcd block(da, db);
    for (uint32_t a = 0; a < da; ++a)
        for (uint32_t b = 0; b < db; ++b)
            block(a, b) = state.amp[scatter_a[a] | scatter_b[b]];
    const Eigen::MatrixXcd rho = block * block.adjoint();
    return -std::log(std::min(rho.squaredNorm(), 1.0));
}

}  // namespace

observables::ObservableRecord exact_observables(const EDState& state,
                                                const lattice::LatticeModel& model,
                                                const EDObservablesOptions& opts) {
    const int n = state.num_sites;
    const uint32_t dim = 1u << n;
    observables::ObservableRecord rec;
    rec.t = state.time;
    const auto cm = collective_moments(state);
    rec.jx_mean = cm.jx;
    rec.jx_var = cm.jx2 - cm.jx * cm.jx;
    rec.jz_mean = cm.jz;
    rec.jz_var = cm.jz2 - cm.jz * cm.jz;
    Eigen::Matrix2d cov;
    const double cyz = cm.yz_sym - cm.jy * cm.jz;
    cov << cm.jy2 - cm.jy * cm.jy, cyz, cyz, cm.jz2 - cm.jz * cm.jz;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    rec.var_perp_min = es.eigenvalues()(0);
    rec.xi2 = std::abs(cm.jx) < 1e-9 * n
                  ? observables::depolarized_sentinel
                  : n * rec.var_perp_min / (cm.jx * cm.jx);
    rec.n0_frac = observables::not_computed;
    rec.nfm_frac = observables::not_computed;
    rec.kx_mean = observables::not_computed;
    rec.kx_var = observables::not_computed;

    if (opts.correlations) {
        rec.cyy.assign(n, {});
        rec.czz.assign(n, {});
        const auto& psi = state.amp;
        for (int d = 0; d < n; ++d) {
            KahanSum zz, yy;
            for (int i = 0; i < n; ++i) {
                // j displaced from i by d on the torus
                const auto ci = model.coords(i);
                const auto cd = model.coords(d);
                const int L = model.spec.extent;
                const int j = model.index((ci[0] + cd[0]) % L,
                                          model.spec.dimension == 2 ? (ci[1] + cd[1]) % L : 0);
                if (j == i) {
                    zz.add(0.25);
                    yy.add(0.25);
                    continue;
                }
                const uint32_t mi = 1u << i, mj = 1u << j;
                double czz_ij = 0.0;
                complex terms{};  // <S+S+> - <S+S-> - <S-S+> + <S-S->
                for (uint32_t s = 0; s < dim; ++s) {
                    const double p = std::norm(psi[s]);
                    const bool bi = s & mi, bj = s & mj;
                    czz_ij += p * (bi ? 0.5 : -0.5) * (bj ? 0.5 : -0.5);
                    const complex a = psi[s];
                    if (a == complex{}) continue;
                    if (!bi && !bj) terms += std::conj(psi[s | mi | mj]) * a;
                    if (!bi && bj) terms -= std::conj(psi[(s | mi) ^ mj]) * a;
                    if (bi && !bj) terms -= std::conj(psi[(s ^ mi) | mj]) * a;
                    if (bi && bj) terms += std::conj(psi[s ^ (mi | mj)]) * a;
                }
                zz.add(czz_ij);
                yy.add(-0.25 * terms.real());
            }
            rec.czz[d] = {0.0, 0.0, zz.value() / n};
            rec.cyy[d] = {0.0, 0.0, yy.value() / n};
        }
    }
    if (opts.entropy) {
        std::vector<int> region = opts.entropy_region;
        if (region.empty()) region = entropy::half_region(model.spec);
        rec.s2_total = renyi2_region(state, region);
    }
    return rec;
}

double sector_ground_energy(const SectorHamiltonian& ham, int n_up) {
    const int dim = ham.sector_dim(n_up);
    if (dim == 1) {
        double in = 1.0, out = 0.0;
        ham.apply(n_up, std::span<const double>(&in, 1), std::span<double>(&out, 1));
        return out;
    }
    if (dim <= 500) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham.dense(n_up));
        return es.eigenvalues()(0);
    }
    // restarted Lanczos with full reorthogonalization
    std::mt19937 rng(0x5eed + n_up);
    std::normal_distribution<double> gauss;
    std::vector<double> start(dim);
    for (auto& x : start) x = gauss(rng);

    const int block = 100;
    double e_prev = std::numeric_limits<double>::infinity();
    std::vector<double> w(dim);
    for (int restart = 0; restart < 30; ++restart) {
        double nrm = 0.0;
        for (double x : start) nrm += x * x;
        nrm = std::sqrt(nrm);
        for (auto& x : start) x /= nrm;
        std::vector<std::vector<double>> v{start};
        std::vector<double> alpha, beta;
        int m = block;
        for (int k = 0; k < block; ++k) {
            if (k >= dim) {
                m = k;
                break;
            }
            ham.apply(n_up, std::span<const double>(v[k]), std::span<double>(w));
            if (k > 0)
                for (int i = 0; i < dim; ++i) w[i] -= beta[k - 1] * v[k - 1][i];
            double a = 0.0;
            for (int i = 0; i < dim; ++i) a += v[k][i] * w[i];
            alpha.push_back(a);
            for (int i = 0; i < dim; ++i) w[i] -= a * v[k][i];
            for (const auto& vk : v) {
                double c = 0.0;
                for (int i = 0; i < dim; ++i) c += vk[i] * w[i];
                for (int i = 0; i < dim; ++i) w[i] -= c * vk[i];
            }
            double nb = 0.0;
            for (double x : w) nb += x * x;
            nb = std::sqrt(nb);
            if (k + 1 == block || nb < 1e-12) {
                m = k + 1;
                break;
            }
            beta.push_back(nb);
            v.push_back(w);
            for (auto& x : v.back()) x /= nb;
        }
        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
        for (int k = 0; k < m; ++k) {
            tmat(k, k) = alpha[k];
            if (k + 1 < m) tmat(k, k + 1) = tmat(k + 1, k) = beta[k];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
        const double e0 = es.eigenvalues()(0);
        // Ritz vector as the next start
        std::fill(start.begin(), start.end(), 0.0);
        for (int k = 0; k < m; ++k) {
            const double c = es.eigenvectors()(k, 0);
            for (int i = 0; i < dim; ++i) start[i] += c * v[k][i];
        }
        if (std::abs(e0 - e_prev) < 1e-12 * (std::abs(e0) + 1.0)) return e0;
        e_prev = e0;
        if (m < block) return e0;  // Krylov space exhausted
    }
    return e_prev;
}

TowerFit fit_tower(const lattice::LatticeModel& model, int max_jz, int workers,
                   double residual_threshold) {
    SectorHamiltonian ham(model);
    const int n = ham.num_sites();
    std::vector<int> nups;
    std::vector<double> jz;
    for (int nup = (n + 1) / 2; nup <= n; ++nup) {
        const double m = nup - n / 2.0;
        if (max_jz >= 0 && m > max_jz + 1e-9) break;
        nups.push_back(nup);
        jz.push_back(m);
    }
    std::vector<double> energies(nups.size());
    parallel_sectors(static_cast<int>(nups.size()), workers,
                     [&](int k) { energies[k] = sector_ground_energy(ham, nups[k]); });

    // weighted LSQ of E vs (J^z)^2; sectors +-J^z are degenerate (mirrored weight 2)
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t k = 0; k < nups.size(); ++k) {
        const double x = jz[k] * jz[k];
        const double wgt = jz[k] > 1e-9 ? 2.0 : 1.0;
        sw += wgt;
        sx += wgt * x;
        sy += wgt * energies[k];
        sxx += wgt * x * x;
        sxy += wgt * x * energies[k];
    }
    const double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-30) throw NumericError("tower fit is degenerate");
    const double slope = (sw * sxy - sx * sy) / det;
    const double icpt = (sxx * sy - sx * sxy) / det;
    if (slope <= 0.0)
        throw NumericError("tower fit produced a non-positive curvature; no ToS structure");

    TowerFit fit;
    fit.e0 = icpt;
    fit.i_tos = 1.0 / (2.0 * slope);
    fit.jz_values = jz;
    fit.sector_energies = energies;
    double ss = 0.0, wtot = 0.0;
    double emin = energies[0], emax = energies[0];
    for (size_t k = 0; k < nups.size(); ++k) {
        const double wgt = jz[k] > 1e-9 ? 2.0 : 1.0;
        const double d = energies[k] - (icpt + slope * jz[k] * jz[k]);
        ss += wgt * d * d;
        wtot += wgt;
        emin = std::min(emin, energies[k]);
        emax = std::max(emax, energies[k]);
    }
    const double spread = std::max(emax - emin, 1e-300);
    fit.rel_residual = std::sqrt(ss / wtot) / spread;
    fit.quadratic = fit.rel_residual <= residual_threshold;
    return fit;
}

}  // namespace rsw::ed
