#ifndef RSW_SPINWAVE_HPP
#define RSW_SPINWAVE_HPP

#include <vector>

#include "rsw/lattice.hpp"
#include "rsw/numerics.hpp"

namespace rsw::spinwave {

// Quadratic coefficients A_q = S[J_0 - J_q (1+Delta)/2], B_q = -J_q S (1-Delta)/2
// for every momentum in the model's fixed order. Index 0 (q = 0) belongs to
// the rotor and is kept as a zero placeholder.
struct SWCoefficients {
    std::vector<double> a;
    std::vector<double> b;
};

SWCoefficients coefficients(const lattice::LatticeModel& model);

// Population and anomalous average of one momentum mode evolved from vacuum.
struct ModeState {
    double n = 0.0;
    complex m = {0.0, 0.0};
};

// Closed-form solution of db/dt = -i(A b + B b'^dag) from the vacuum:
//   u = C - i A Sn, v = -i B Sn, n = |v|^2 = B^2 Sn^2, m = u v,
// where C/Sn = cos(w t), sin(w t)/w for A^2 > B^2 (w^2 = A^2 - B^2),
// the hyperbolic pair for A^2 < B^2, and C = 1, Sn = t at the degenerate
// point. Self-paired momenta (q = -q) obey the same 2x2 structure.
ModeState evolve_mode(double a, double b, double t);

// All q != 0 modes at one time; n[0], m[0] stay zero.
struct SWModeSet {
    double time = 0.0;
    std::vector<double> n;
    std::vector<complex> m;
};

SWModeSet evolve_modes(const SWCoefficients& coeffs, double t);

// N_FM = sum_{q != 0} n_q (compensated sum).
double total_fm_population(const SWModeSet& modes);

// SW energy sum_q [A_q n_q + B_q Re m_q]; vanishes identically for the
// vacuum-seeded evolution, kept as a conservation diagnostic.
double sw_energy(const SWCoefficients& coeffs, const SWModeSet& modes);

// Real-space Green functions by displacement index:
//   G(d) = N^{-1} sum_{q!=0} e^{iq.d} n_q   (real, even in d)
//   F(d) = N^{-1} sum_{q!=0} e^{iq.d} m_q   (complex, even in d)
struct GreenFunctions {
    std::vector<double> g;
    std::vector<complex> f;

    double trace_g(int num_sites) const;  // sum_i G_ii = N_FM
};

GreenFunctions realspace_green(const SWModeSet& modes, const lattice::LatticeModel& model);

}  // namespace rsw::spinwave

#endif
