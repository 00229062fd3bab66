#ifndef RSW_ROTOR_HPP
#define RSW_ROTOR_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rsw/lattice.hpp"
#include "rsw/numerics.hpp"

namespace rsw::rotor {

// Zero-momentum planar-rotor variable K of length N*S, stored in the K^z
// eigenbasis M in {-NS, ..., +NS}. amp[k] is the amplitude of M = k - NS.
// States are immutable values; evolution returns a new state.
struct RotorState {
    int num_spins = 0;
    double spin = 0.5;
    double time = 0.0;
    std::vector<complex> amp;

    double j_tot() const { return num_spins * spin; }
    int dim() const { return static_cast<int>(amp.size()); }
    double m_of(int k) const { return k - j_tot(); }
    double norm2() const;
};

// Coherent state polarized along +x: psi_M = 2^{-J} sqrt(C(2J, J+M)).
// Evaluated in the log domain (valid for N up to 1e5 and beyond).
RotorState css_x_state(int num_spins, double spin = 0.5);

// psi_M(t) = exp(-i M^2 t / (2 I)) psi_M(0). inertia may be negative
// (easy-axis side) or +infinity (frozen rotor, delta = 1); zero is an error.
RotorState evolve(const RotorState& state, double inertia, double t);

struct Moments {
    double kx = 0, ky = 0, kz = 0;
    double kx2 = 0, ky2 = 0, kz2 = 0;
    double yz_sym = 0;  // <{K^y, K^z}>/2

    double var_kx() const { return kx2 - kx * kx; }
    // symmetric covariance matrix of (K^y, K^z), cross term included
    Eigen::Matrix2d cov_perp() const;
    double min_perp_variance() const;
};

Moments moments(const RotorState& state);

struct InertiaReference {
    int n_ref = 0;
    double j0_ref = 0.0;
    double i_tos_ref = 0.0;
};

// Bare moment of inertia (N-1)/[J_0 (1-Delta)]. Returns +infinity for
// Delta = 1 (frozen rotor) rather than failing.
double bare_inertia(const lattice::LatticeModel& model);

// Tower-of-states inertia scaled from a reference extraction:
// I(N) = (N-1)/(N_ref-1) * J0_ref/J0(N) * I_ref. Without a reference this
// falls back to the bare value.
double tos_inertia(const lattice::LatticeModel& model,
                   const std::optional<InertiaReference>& ref);

// Reduced density matrix of a block of n_a spins, from the Schmidt
// decomposition of Dicke states into block Dicke sectors. Dimension
// 2*n_a*S + 1; Hermitian, PSD, unit trace.
Eigen::MatrixXcd reduced_density(const RotorState& state, int n_a);

}  // namespace rsw::rotor

#endif
