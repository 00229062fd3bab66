#include "rsw/rotor.hpp"

#include <cmath>

namespace rsw::rotor {

double RotorState::norm2() const {
    KahanSum acc;
    for (const auto& a : amp) acc.add(std::norm(a));
    return acc.value();
}

RotorState css_x_state(int num_spins, double spin) {
    if (num_spins < 2) throw std::invalid_argument("css_x_state: need N >= 2");
    if (spin <= 0.0 || !is_half_integer(spin))
        throw std::invalid_argument("css_x_state: spin must be a positive half-integer");
    RotorState st;
    st.num_spins = num_spins;
    st.spin = spin;
    const double j = st.j_tot();
    const int dim = static_cast<int>(std::llround(2.0 * j)) + 1;
    st.amp.resize(dim);
    const double ln2 = std::log(2.0);
    for (int k = 0; k < dim; ++k) {
        // psi_M = 2^{-J} sqrt(C(2J, J+M)), k = J+M
        st.amp[k] = std::exp(0.5 * log_binomial(2.0 * j, k) - j * ln2);
    }
    return st;
}

RotorState evolve(const RotorState& state, double inertia, double t) {
    if (inertia == 0.0) throw std::invalid_argument("rotor evolve: inertia must be nonzero");
    RotorState out = state;
    out.time = state.time + t;
    if (std::isinf(inertia)) return out;  // frozen rotor (delta = 1)
    const double theta = t / (2.0 * inertia);
    const double j = state.j_tot();
    for (int k = 0; k < state.dim(); ++k) {
        const double m = k - j;
        const double phase = std::fmod(m * m * theta, 2.0 * pi);
        out.amp[k] = state.amp[k] * std::polar(1.0, -phase);
    }
    return out;
}

Moments moments(const RotorState& state) {
    const double j = state.j_tot();
    const int dim = state.dim();
    const auto& a = state.amp;
    auto ladder = [&](double m) { return std::sqrt(j * (j + 1.0) - m * (m + 1.0)); };

    complex kp = 0, kpp = 0, w = 0;
    KahanSum kz, kz2;
    for (int k = 0; k < dim; ++k) {
        const double m = k - j;
        const double p = std::norm(a[k]);
        kz.add(m * p);
        kz2.add(m * m * p);
        if (k + 1 < dim) {
            const double c = ladder(m);
            kp += std::conj(a[k + 1]) * c * a[k];
            w += std::conj(a[k + 1]) * ((2.0 * m + 1.0) * c) * a[k];
        }
        if (k + 2 < dim) kpp += std::conj(a[k + 2]) * (ladder(m + 1.0) * ladder(m)) * a[k];
    }

    Moments out;
    out.kx = kp.real();
    out.ky = kp.imag();
    out.kz = kz.value();
    out.kz2 = kz2.value();
    const double sym = j * (j + 1.0) - out.kz2;  // <(K+K- + K-K+)>/2
    out.kx2 = 0.5 * (kpp.real() + sym);
    out.ky2 = 0.5 * (-kpp.real() + sym);
    out.yz_sym = 0.5 * w.imag();
    return out;
}

Eigen::Matrix2d Moments::cov_perp() const {
    Eigen::Matrix2d c;
    const double cyz = yz_sym - ky * kz;
    c << ky2 - ky * ky, cyz, cyz, kz2 - kz * kz;
    return c;
}

double Moments::min_perp_variance() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov_perp());
    return es.eigenvalues()(0);
}

double bare_inertia(const lattice::LatticeModel& model) {
    const double one_minus_delta = 1.0 - model.spec.delta;
    if (one_minus_delta == 0.0) return std::numeric_limits<double>::infinity();
    return (model.num_sites - 1) / (model.j0 * one_minus_delta);
}

double tos_inertia(const lattice::LatticeModel& model,
                   const std::optional<InertiaReference>& ref) {
    if (!ref) return bare_inertia(model);
    if (ref->n_ref < 2 || ref->j0_ref <= 0.0)
        throw std::invalid_argument("tos_inertia: invalid reference triple");
    return (model.num_sites - 1.0) / (ref->n_ref - 1.0) * (ref->j0_ref / model.j0) *
           ref->i_tos_ref;
}

Eigen::MatrixXcd reduced_density(const RotorState& state, int n_a) {
    if (n_a <= 0 || n_a >= state.num_spins)
        throw std::invalid_argument("reduced_density: need 0 < N_A < N");
    const double s = state.spin;
    const double ja = n_a * s;
    const double jb = (state.num_spins - n_a) * s;
    const double j = state.j_tot();
    const int da = static_cast<int>(std::llround(2.0 * ja)) + 1;
    const int db = static_cast<int>(std::llround(2.0 * jb)) + 1;
    const int d = state.dim();

    // Schmidt coefficients of |J, M=k-J>: c_k(kA) = sqrt(C(2Ja,kA) C(2Jb,k-kA)/C(2J,k))
    // Precompute half-log binomials.
    std::vector<double> la(da), lb(db), lt(d);
    for (int k = 0; k < da; ++k) la[k] = 0.5 * log_binomial(2.0 * ja, k);
    for (int k = 0; k < db; ++k) lb[k] = 0.5 * log_binomial(2.0 * jb, k);
    for (int k = 0; k < d; ++k) lt[k] = 0.5 * log_binomial(2.0 * j, k);

    // psi-weighted block amplitudes: Phi[kA][kB] = psi_{kA+kB} c_{kA+kB}(kA)
    // rho_A = Phi Phi^dag.
    Eigen::MatrixXcd phi(da, db);
    for (int ka = 0; ka < da; ++ka)
        for (int kb = 0; kb < db; ++kb) {
            const int k = ka + kb;
            phi(ka, kb) = state.amp[k] * std::exp(la[ka] + lb[kb] - lt[k]);
        }
    return phi * phi.adjoint();
}

}  // namespace rsw::rotor
