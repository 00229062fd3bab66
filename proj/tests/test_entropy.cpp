#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rsw/entropy.hpp"
#include "rsw/observables.hpp"

using namespace rsw;
using namespace rsw::entropy;

namespace {

lattice::LatticeModel dipolar_2d(int L, double delta = 0.0) {
    lattice::LatticeSpec s;
    s.dimension = 2;
    s.extent = L;
    s.alpha = 3.0;
    s.delta = delta;
    return lattice::build_model(s);
}

std::vector<int> complement(const std::vector<int>& region, int n) {
    std::vector<bool> in(n, false);
    for (int s : region) in[s] = true;
    std::vector<int> out;
    for (int s = 0; s < n; ++s)
        if (!in[s]) out.push_back(s);
    return out;
}

}  // namespace

TEST_CASE("half region shapes") {
    lattice::LatticeSpec s1;
    s1.dimension = 1;
    s1.extent = 8;
    CHECK(half_region(s1) == std::vector<int>{0, 1, 2, 3});
    lattice::LatticeSpec s2;
    s2.dimension = 2;
    s2.extent = 4;
    CHECK(half_region(s2).size() == 8);  // 4 x 2 rectangle
}

TEST_CASE("SW entropy vanishes in the vacuum and for the full system") {
    const auto m = dipolar_2d(4);
    const auto c = spinwave::coefficients(m);
    const auto region = half_region(m.spec);

    const auto vac = spinwave::realspace_green(spinwave::evolve_modes(c, 0.0), m);
    CHECK(renyi2_sw(vac, m, region) == doctest::Approx(0.0).epsilon(1e-12));

    const auto green = spinwave::realspace_green(spinwave::evolve_modes(c, 1.4), m);
    std::vector<int> full(m.num_sites);
    for (int k = 0; k < m.num_sites; ++k) full[k] = k;
    CHECK(std::abs(renyi2_sw(green, m, full)) < 1e-8);  // globally pure Gaussian state
}

TEST_CASE("complementary halves carry equal SW entropy") {
    const auto m = dipolar_2d(4);
    const auto c = spinwave::coefficients(m);
    for (double t : {0.4, 1.1, 2.5}) {
        const auto green = spinwave::realspace_green(spinwave::evolve_modes(c, t), m);
        const auto region = half_region(m.spec);
        const double sa = renyi2_sw(green, m, region);
        const double sb = renyi2_sw(green, m, complement(region, m.num_sites));
        CHECK(sa >= 0.0);
        CHECK(sa == doctest::Approx(sb).epsilon(1e-8));
    }
}

TEST_CASE("unphysical covariance is a hard error") {
    Eigen::MatrixXd sigma = 0.3 * Eigen::MatrixXd::Identity(4, 4);
    CHECK_THROWS_AS(symplectic_eigenvalues(sigma), NumericError);
}

TEST_CASE("vacuum symplectic spectrum is 1/2") {
    Eigen::MatrixXd sigma = 0.5 * Eigen::MatrixXd::Identity(6, 6);
    for (double nu : symplectic_eigenvalues(sigma)) CHECK(nu == doctest::Approx(0.5));
}

TEST_CASE("region growth in the dilute regime") {
    const auto m = dipolar_2d(4);
    const auto c = spinwave::coefficients(m);
    const auto green = spinwave::realspace_green(spinwave::evolve_modes(c, 0.6), m);
    // nested rectangles up to the half system
    std::vector<int> r1, r2;
    for (int x = 0; x < 1; ++x)
        for (int y = 0; y < 4; ++y) r1.push_back(x * 4 + y);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 4; ++y) r2.push_back(x * 4 + y);
    const double s1 = renyi2_sw(green, m, r1);
    const double s2 = renyi2_sw(green, m, r2);
    CHECK(s1 >= 0.0);
    CHECK(s2 >= s1 - 1e-9);
}

TEST_CASE("rotor entropy: zero at t=0, log 2 at the GHZ time, capped by the block dimension") {
    const int n = 12;
    const auto st = rotor::css_x_state(n);
    CHECK(renyi2_rotor(st, 6) == doctest::Approx(0.0).epsilon(1e-12));

    const double i0 = 1.4;
    const auto ghz = rotor::evolve(st, i0, pi * i0);
    CHECK(renyi2_rotor(ghz, 6) == doctest::Approx(std::log(2.0)).epsilon(1e-10));

    for (double t : {0.3, 0.9, 2.2}) {
        const auto e = rotor::evolve(st, i0, t);
        const double s2 = renyi2_rotor(e, 6);
        CHECK(s2 >= 0.0);
        CHECK(s2 <= std::log(6.0 + 1.0) + 1e-12);  // log(2 N_A S + 1)
    }
}

TEST_CASE("rotor entropy dips at t_q = 2 pi I / q") {
    const int n = 32;
    const auto st = rotor::css_x_state(n);
    const double i0 = 2.0;
    for (int q : {2, 3, 4}) {
        const double tq = 2.0 * pi * i0 / q;
        const double at_tq = renyi2_rotor(rotor::evolve(st, i0, tq), n / 2);
        const double before = renyi2_rotor(rotor::evolve(st, i0, 0.97 * tq), n / 2);
        const double after = renyi2_rotor(rotor::evolve(st, i0, 1.03 * tq), n / 2);
        CHECK(at_tq < before);
        CHECK(at_tq < after);
        // a q-headed cat of orthogonal branches has S_2 = log q
        CHECK(at_tq == doctest::Approx(std::log(static_cast<double>(q))).epsilon(0.02));
    }
}

TEST_CASE("total entropy is the sector sum") {
    const auto m = dipolar_2d(4);
    const auto c = spinwave::coefficients(m);
    const double i0 = 2.4;
    const auto st = rotor::evolve(rotor::css_x_state(m.num_sites), i0, 0.8);
    const auto green = spinwave::realspace_green(spinwave::evolve_modes(c, 0.8), m);
    const auto region = half_region(m.spec);
    const double total = renyi2_total(st, green, m, region);
    CHECK(total == doctest::Approx(renyi2_rotor(st, 8) + renyi2_sw(green, m, region))
                       .epsilon(1e-12));
}
