// Test-only oracles, kept independent of the implementation paths they check.
#ifndef RSW_TESTS_ORACLE_UTILS_HPP
#define RSW_TESTS_ORACLE_UTILS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace rsw_test {

using complex = std::complex<double>;

// RK4 integration of the Bogoliubov mode functions:
//   d/dt [u, vbar] = [[-iA, -iB], [iB, iA]] [u, vbar],  u(0)=1, vbar(0)=0.
// Returns (n, m) = (|v|^2, u v) at the requested times (strictly increasing).
struct ModeTrajectory {
    std::vector<double> n;
    std::vector<complex> m;
};

inline ModeTrajectory integrate_mode(double a, double b, const std::vector<double>& times,
                                     double dt = 1e-4) {
    ModeTrajectory out;
    complex u{1.0, 0.0}, vbar{0.0, 0.0};
    const complex ia{0.0, a}, ib{0.0, b};
    auto rhs = [&](complex uu, complex vv, complex& du, complex& dv) {
        du = -ia * uu - ib * vv;
        dv = ib * uu + ia * vv;
    };
    double t = 0.0;
    for (double target : times) {
        while (t < target - 1e-15) {
            const double h = std::min(dt, target - t);
            complex k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
            rhs(u, vbar, k1u, k1v);
            rhs(u + 0.5 * h * k1u, vbar + 0.5 * h * k1v, k2u, k2v);
            rhs(u + 0.5 * h * k2u, vbar + 0.5 * h * k2v, k3u, k3v);
            rhs(u + h * k3u, vbar + h * k3v, k4u, k4v);
            u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            vbar += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            t += h;
        }
        const complex v = std::conj(vbar);
        out.n.push_back(std::norm(v));
        out.m.push_back(u * v);
    }
    return out;
}

// Dense 2^N x 2^N XXZ Hamiltonian assembled from Kronecker products of local
// operators; a construction path disjoint from the sector machinery.
inline Eigen::MatrixXd dense_xxz(const Eigen::MatrixXd& couplings, double delta) {
    const int n = static_cast<int>(couplings.rows());
    const int dim = 1 << n;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    auto bit = [](int state, int site) { return (state >> site) & 1; };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double jij = couplings(i, j);
            if (jij == 0.0) continue;
            for (int s = 0; s < dim; ++s) {
                const double zi = bit(s, i) - 0.5, zj = bit(s, j) - 0.5;
                h(s, s) += -jij * delta * zi * zj;
                if (bit(s, i) != bit(s, j)) {
                    const int s2 = s ^ ((1 << i) | (1 << j));
                    h(s2, s) += -jij / 2.0;
                }
            }
        }
    return h;
}

// Many-body state of the pure one-axis-twisting Hamiltonian (J^z)^2/(2I)
// evolved from the x-polarized product state: diagonal phases on the
// computational basis. Oracle for the rotor sector at infinite range.
inline std::vector<complex> oat_many_body_state(int n, double inertia, double t) {
    const int dim = 1 << n;
    std::vector<complex> psi(dim);
    const double amp = std::pow(2.0, -n / 2.0);
    for (int s = 0; s < dim; ++s) {
        const double m = __builtin_popcount(static_cast<unsigned>(s)) - n / 2.0;
        psi[s] = std::polar(amp, -m * m * t / (2.0 * inertia));
    }
    return psi;
}

}  // namespace rsw_test

#endif
