#ifndef RSW_ENTROPY_HPP
#define RSW_ENTROPY_HPP

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "rsw/lattice.hpp"
#include "rsw/rotor.hpp"
#include "rsw/spinwave.hpp"

namespace rsw::entropy {

// Default bipartition: contiguous half. d=1: first L/2 sites; d=2: rectangle
// of rows y < L/2 (L x L/2 = N/2 spins).
std::vector<int> half_region(const lattice::LatticeSpec& spec);

// Quadrature covariance matrix of the SW Gaussian state restricted to a
// region, vacuum convention sigma = I/2. Block layout (x..., p...):
//   sigma_xx = I/2 + G + Re F, sigma_pp = I/2 + G - Re F, sigma_xp = Im F.
struct GaussianRegionState {
    std::vector<int> region;
    Eigen::MatrixXd sigma;
};

GaussianRegionState region_covariance(const spinwave::GreenFunctions& green,
                                      const lattice::LatticeModel& model,
                                      std::span<const int> region);

// Symplectic spectrum of sigma (one entry per mode, nu >= 1/2 for physical
// states). Throws NumericError if nu < 1/2 - 1e-6.
std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& sigma);

// Gaussian Renyi-2 entropy S_2 = sum_k log(2 nu_k)  (Tr rho^2 = prod 1/(2 nu_k)).
double renyi2_sw(const spinwave::GreenFunctions& green, const lattice::LatticeModel& model,
                 std::span<const int> region);

// Rotor Renyi-2 entropy of an n_a-spin block, -log Tr rho_A^2.
double renyi2_rotor(const rotor::RotorState& state, int n_a);

double renyi2_total(const rotor::RotorState& state, const spinwave::GreenFunctions& green,
                    const lattice::LatticeModel& model, std::span<const int> region);

}  // namespace rsw::entropy

#endif
