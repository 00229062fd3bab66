#ifndef RSW_ED_HPP
#define RSW_ED_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rsw/lattice.hpp"
#include "rsw/numerics.hpp"
#include "rsw/observables.hpp"

namespace rsw::ed {

inline constexpr int max_sites = 20;  // hard cap, 2^20 amplitudes

// XXZ Hamiltonian blocked by the conserved number of up spins (J^z sectors).
// Matrix-free: apply() streams over the coupling pair list, memory stays
// O(2^N). S = 1/2 only.
class SectorHamiltonian {
public:
    explicit SectorHamiltonian(const lattice::LatticeModel& model);

    int num_sites() const { return n_; }
    int num_sectors() const { return n_ + 1; }
    const std::vector<uint32_t>& basis(int n_up) const { return bases_[n_up]; }
    int sector_dim(int n_up) const { return static_cast<int>(bases_[n_up].size()); }

    void apply(int n_up, std::span<const complex> in, std::span<complex> out) const;
    void apply(int n_up, std::span<const double> in, std::span<double> out) const;

    Eigen::MatrixXd dense(int n_up) const;

    // Gershgorin-style bound on the spectral radius, used to size Krylov steps.
    double norm_bound() const { return norm_bound_; }

private:
    template <typename Scalar>
    void apply_impl(int n_up, std::span<const Scalar> in, std::span<Scalar> out) const;

    int n_ = 0;
    double delta_ = 0.0;
    struct Pair {
        uint32_t mask;
        double half_j;     // J_ij / 2
        double quarter_d;  // J_ij * delta / 4
    };
    std::vector<Pair> pairs_;
    std::vector<std::vector<uint32_t>> bases_;
    std::vector<int32_t> index_;  // bitmask -> index within its sector
    std::vector<double> diag_;    // bitmask -> diagonal element
    double norm_bound_ = 0.0;
};

// Full many-body wavefunction over the 2^N computational basis (bitmask
// index, bit = up). Sector norms are conserved under the U(1) evolution.
struct EDState {
    int num_sites = 0;
    double time = 0.0;
    std::vector<complex> amp;

    double norm2() const;
    std::vector<double> sector_norms(const SectorHamiltonian& ham) const;
};

EDState css_x_state(int num_sites);

enum class EvolveMethod { Auto, FullDiag, Krylov };

// exp(-iHt) per sector: dense diagonalization for small N, Lanczos-Krylov
// stepping otherwise. Sector evolutions are independent and run in parallel.
class Evolver {
public:
    Evolver(const SectorHamiltonian& ham, EvolveMethod method = EvolveMethod::Auto,
            int workers = 1, int krylov_dim = 30);

    EDState evolve(const EDState& state, double t) const;

private:
    void evolve_sector_full(int n_up, std::vector<complex>& amp, double t) const;
    void evolve_sector_krylov(int n_up, std::vector<complex>& amp, double t) const;

    const SectorHamiltonian& ham_;
    EvolveMethod method_;
    int workers_;
    int krylov_dim_;
};

EDState evolve_exact(const EDState& state, const SectorHamiltonian& ham, double t,
                     EvolveMethod method = EvolveMethod::Auto, int workers = 1);

struct EDObservablesOptions {
    bool correlations = false;
    bool entropy = false;
    std::vector<int> entropy_region;  // empty -> half_region
};

// Exact expectation values in the RSW record schema (combined columns only;
// sector splits stay NaN/empty).
observables::ObservableRecord exact_observables(const EDState& state,
                                                const lattice::LatticeModel& model,
                                                const EDObservablesOptions& opts = {});

// Lowest eigenvalue of one J^z sector (Lanczos with full reorthogonalization;
// dense solve for small sectors).
double sector_ground_energy(const SectorHamiltonian& ham, int n_up);

struct TowerFit {
    double e0 = 0.0;
    double i_tos = 0.0;
    double rel_residual = 0.0;             // rms misfit / energy spread
    bool quadratic = true;                 // residual below threshold
    std::vector<double> jz_values;         // fitted sectors, J^z >= 0
    std::vector<double> sector_energies;   // matching minima
};

// Least-squares fit E_min(J^z) = E_0 + (J^z)^2/(2 I_ToS) over sectors
// |J^z| <= max_jz (mirrored weights). max_jz < 0 selects the full tower
// (|J^z| <= N S). residual_threshold flags non-quadratic spectra.
TowerFit fit_tower(const lattice::LatticeModel& model, int max_jz = -1, int workers = 1,
                   double residual_threshold = 1e-2);

}  // namespace rsw::ed

#endif
