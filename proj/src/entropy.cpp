#include "rsw/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace rsw::entropy {

std::vector<int> half_region(const lattice::LatticeSpec& spec) {
    std::vector<int> region;
    const int L = spec.extent;
    if (spec.dimension == 1) {
        for (int x = 0; x < L / 2; ++x) region.push_back(x);
    } else {
        for (int x = 0; x < L / 2; ++x)
            for (int y = 0; y < L; ++y) region.push_back(x * L + y);
    }
    return region;
}

GaussianRegionState region_covariance(const spinwave::GreenFunctions& green,
                                      const lattice::LatticeModel& model,
                                      std::span<const int> region) {
    const int na = static_cast<int>(region.size());
    GaussianRegionState out;
    out.region.assign(region.begin(), region.end());
    out.sigma = Eigen::MatrixXd::Zero(2 * na, 2 * na);
    for (int r = 0; r < na; ++r)
        for (int c = 0; c < na; ++c) {
            const int disp = model.displacement_index(region[r], region[c]);
            const double g = green.g[disp];
            const complex f = green.f[disp];
            const double half = (r == c) ? 0.5 : 0.0;
            out.sigma(r, c) = half + g + f.real();            // xx
            out.sigma(na + r, na + c) = half + g - f.real();  // pp
            out.sigma(r, na + c) = f.imag();                  // xp
            out.sigma(na + r, c) = f.imag();                  // px
        }
    return out;
}

std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& sigma) {
    const int two_na = static_cast<int>(sigma.rows());
    const int na = two_na / 2;
    // eigenvalues of (Omega sigma) come in pairs +-i nu
    Eigen::MatrixXd omega_sigma(two_na, two_na);
    omega_sigma.topRows(na) = sigma.bottomRows(na);
    omega_sigma.bottomRows(na) = -sigma.topRows(na);
    Eigen::EigenSolver<Eigen::MatrixXd> es(omega_sigma, false);
    std::vector<double> mags(two_na);
    for (int k = 0; k < two_na; ++k) mags[k] = std::abs(es.eigenvalues()(k).imag());
    std::sort(mags.begin(), mags.end());
    // deduplicate the +- pairs by magnitude matching
    std::vector<double> nus(na);
    for (int k = 0; k < na; ++k) {
        const double lo = mags[2 * k];
        const double hi = mags[2 * k + 1];
        if (hi - lo > 1e-9 * std::max(1.0, hi))
            throw NumericError("symplectic spectrum did not pair up (gap " +
                               std::to_string(hi - lo) + ")");
        nus[k] = 0.5 * (lo + hi);
        if (nus[k] < 0.5 - 1e-6)
            throw NumericError("unphysical covariance matrix: nu = " + std::to_string(nus[k]));
        nus[k] = std::max(nus[k], 0.5);
    }
    return nus;
}

double renyi2_sw(const spinwave::GreenFunctions& green, const lattice::LatticeModel& model,
                 std::span<const int> region) {
    const auto grs = region_covariance(green, model, region);
    const auto nus = symplectic_eigenvalues(grs.sigma);
    KahanSum s2;
    for (double nu : nus) s2.add(std::log(2.0 * nu));
    return s2.value();
}

double renyi2_rotor(const rotor::RotorState& state, int n_a) {
    const Eigen::MatrixXcd rho = rotor::reduced_density(state, n_a);
    const double tr2 = rho.squaredNorm();  // Tr rho^2 for Hermitian rho
    return std::max(0.0, -std::log(std::min(tr2, 1.0)));
}

double renyi2_total(const rotor::RotorState& state, const spinwave::GreenFunctions& green,
                    const lattice::LatticeModel& model, std::span<const int> region) {
    return renyi2_rotor(state, static_cast<int>(region.size())) +
           renyi2_sw(green, model, region);
}

}  // namespace rsw::entropy
