#ifndef RSW_LATTICE_HPP
#define RSW_LATTICE_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace rsw::lattice {

enum class DistanceConvention { MinimumImage, ImageSummed };

std::string to_string(DistanceConvention c);
DistanceConvention convention_from_string(const std::string& s);

// Geometry and coupling law of a periodic chain (d=1) or square lattice (d=2)
// with ferromagnetic power-law couplings J_ij = J / r^alpha. alpha = 0 means
// literal infinite-range coupling (every J_ij = J).
struct LatticeSpec {
    int dimension = 1;
    int extent = 2;          // L, sites per axis; N = L^dimension
    double alpha = 3.0;      // power-law exponent, >= 0
    double coupling = 1.0;   // J, energy unit of the model
    double delta = 0.0;      // anisotropy of the z-z term
    double spin = 0.5;       // S, half-integer
    DistanceConvention convention = DistanceConvention::MinimumImage;

    int sites() const;
    void validate() const;   // throws std::invalid_argument listing all violations
};

// Immutable once built; shared read-only across workers.
struct LatticeModel {
    LatticeSpec spec;
    int num_sites = 0;
    Eigen::MatrixXd couplings;               // J_ij, symmetric, zero diagonal
    std::vector<double> coupling_by_disp;    // J(d), row-major displacement index
    std::vector<double> fourier;             // J_q, row-major momentum index, q=0 first
    double j0 = 0.0;                         // J_{q=0}

    // row-major index helpers shared by every module
    int index(int x, int y = 0) const;
    std::array<int, 2> coords(int idx) const;
    int displacement_index(int i, int j) const;     // index of r_j - r_i (mod L)
    int negate(int idx) const;                      // index of -d (or -q)
    std::array<double, 2> momentum(int idx) const;  // q components in (-pi, pi] units of 1/a
};

// Sum over all periodic images: sum_{n in Z^d} |u + n|^{-alpha} with
// u in [0,1)^d not on the integer lattice. Requires alpha > d. Evaluated by
// an Ewald split (exponentially convergent); exposed for direct testing.
double periodic_power_sum(int dimension, double alpha, const std::array<double, 2>& u);

LatticeModel build_model(const LatticeSpec& spec);

// Lattice Fourier transform of a translation-invariant coupling matrix:
// J_q = N^{-1} sum_{ij} e^{iq.(r_i - r_j)} J_ij. Throws if the matrix is not
// symmetric / translation invariant (row-spectrum mismatch).
std::vector<double> fourier_couplings(const Eigen::MatrixXd& couplings, int dimension,
                                      int extent);

}  // namespace rsw::lattice

#endif
