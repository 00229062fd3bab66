#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle_utils.hpp"
#include "rsw/spinwave.hpp"

using namespace rsw;
using namespace rsw::spinwave;

namespace {

lattice::LatticeModel model_1d(int L, double alpha, double delta = 0.0) {
    lattice::LatticeSpec s;
    s.dimension = 1;
    s.extent = L;
    s.alpha = alpha;
    s.delta = delta;
    return lattice::build_model(s);
}

}  // namespace

TEST_CASE("delta = 1 kills the pairing terms") {
    const auto m = model_1d(8, 3.0, 1.0);
    const auto c = coefficients(m);
    for (int k = 1; k < 8; ++k) {
        CHECK(c.b[k] == 0.0);
        const auto ms = evolve_mode(c.a[k], c.b[k], 2.7);
        CHECK(ms.n == 0.0);
        CHECK(ms.m == complex{});
    }
}

TEST_CASE("nearest-neighbor limit coefficients, S=1/2, delta=0") {
    const auto m = model_1d(8, 1200.0);
    const auto c = coefficients(m);
    for (int k = 1; k < 8; ++k) {
        const double q = 2.0 * pi * k / 8.0;
        CHECK(c.a[k] == doctest::Approx(1.0 - std::cos(q) / 2.0).epsilon(1e-12));
        CHECK(c.b[k] == doctest::Approx(-std::cos(q) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("infinite-range coefficients: B/A of order 1/N") {
    const int n = 64;
    const auto m = model_1d(n, 0.0);
    const auto c = coefficients(m);
    for (int k = 1; k < n; ++k) {
        CHECK(c.a[k] == doctest::Approx(0.5 * ((n - 1) + 0.5)).epsilon(1e-12));
        CHECK(c.b[k] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(std::abs(c.b[k] / c.a[k]) < 2.0 / n);
    }
}

TEST_CASE("stable mode: n at Omega t = pi/2 equals B^2/Omega^2") {
    const double a = 1.0, b = 0.5;
    const double omega = std::sqrt(a * a - b * b);
    const auto ms = evolve_mode(a, b, 0.5 * pi / omega);
    CHECK(ms.n == doctest::Approx(b * b / (omega * omega)).epsilon(1e-12));  // = 1/3
    CHECK(ms.n == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("degenerate point: n = (B t)^2") {
    const double b = 0.7;
    for (double t : {0.1, 1.0, 3.0}) {
        const auto ms = evolve_mode(b, b, t);
        CHECK(ms.n == doctest::Approx(b * b * t * t).epsilon(1e-8));
    }
}

TEST_CASE("closed form vs RK4 integration on all branches") {
    struct Case {
        double a, b;
    };
    const Case cases[] = {
        {1.0, 0.5},    // stable
        {0.7, 0.7},    // degenerate
        {0.3, 0.45},   // unstable
        {0.0, 0.25},   // pure squeezing
        {1.4, -0.9},   // negative B
    };
    std::vector<double> times;
    for (int k = 1; k <= 40; ++k) times.push_back(0.25 * k);
    for (const auto& c : cases) {
        const auto traj = rsw_test::integrate_mode(c.a, c.b, times);
        for (size_t k = 0; k < times.size(); ++k) {
            const auto ms = evolve_mode(c.a, c.b, times[k]);
            CHECK(std::abs(ms.n - traj.n[k]) < 1e-9);
            CHECK(std::abs(ms.m - traj.m[k]) < 1e-9);
        }
    }
}

TEST_CASE("pair-state purity n(n+1) = |m|^2 (property)") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ua(0.0, 2.0), ub(-1.5, 1.5), ut(0.0, 20.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = ua(rng);
        double b = ub(rng);
        if (b * b > a * a) b = std::copysign(std::sqrt(a * a + 0.1), b);  // keep growth mild
        const double t = ut(rng);
        const auto ms = evolve_mode(a, b, t);
        CHECK(std::abs(ms.n * (ms.n + 1.0) - std::norm(ms.m)) <
              1e-10 * (1.0 + ms.n) * (1.0 + ms.n));
    }
}

TEST_CASE("stable modes are periodic with period pi/Omega") {
    const double a = 1.3, b = 0.4;
    const double omega = std::sqrt(a * a - b * b);
    for (double t : {0.3, 1.1}) {
        const auto m1 = evolve_mode(a, b, t);
        const auto m2 = evolve_mode(a, b, t + pi / omega);
        CHECK(m1.n == doctest::Approx(m2.n).epsilon(1e-9));
        CHECK(std::abs(m1.m - m2.m) < 1e-9);
    }
}

TEST_CASE("mode set: vacuum start, q = -q symmetry, N_FM") {
    const auto m = model_1d(10, 2.0);
    const auto c = coefficients(m);
    const auto at0 = evolve_modes(c, 0.0);
    CHECK(total_fm_population(at0) == 0.0);
    const auto modes = evolve_modes(c, 1.3);
    CHECK(modes.n[0] == 0.0);
    double total = 0.0;
    for (int k = 1; k < 10; ++k) {
        CHECK(modes.n[k] == doctest::Approx(modes.n[(10 - k) % 10]).epsilon(1e-12));
        CHECK(modes.n[k] >= 0.0);
        total += modes.n[k];
    }
    CHECK(total_fm_population(modes) == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("SW energy stays at its vacuum value") {
    const auto m = model_1d(12, 3.0);
    const auto c = coefficients(m);
    double scale = 0.0;
    for (int k = 1; k < 12; ++k) scale += std::abs(c.a[k]);
    for (double t : {0.2, 1.0, 4.0, 9.0}) {
        const auto modes = evolve_modes(c, t);
        CHECK(std::abs(sw_energy(c, modes)) < 1e-9 * scale * (1.0 + total_fm_population(modes)));
    }
}

TEST_CASE("real-space Green functions") {
    const auto m = model_1d(8, 3.0);
    const auto c = coefficients(m);

    const auto g0 = realspace_green(evolve_modes(c, 0.0), m);
    for (int d = 0; d < 8; ++d) {
        CHECK(g0.g[d] == 0.0);
        CHECK(g0.f[d] == complex{});
    }

    const auto modes = evolve_modes(c, 0.9);
    const auto green = realspace_green(modes, m);
    CHECK(green.trace_g(8) == doctest::Approx(total_fm_population(modes)).epsilon(1e-12));
    for (int d = 1; d < 8; ++d) {
        CHECK(green.g[d] == doctest::Approx(green.g[m.negate(d)]).epsilon(1e-12));
        CHECK(std::abs(green.f[d] - green.f[m.negate(d)]) < 1e-14);
    }
}

TEST_CASE("unstable branch appears for delta < -1 and stays total") {
    const auto m = model_1d(8, 3.0, -1.5);
    const auto c = coefficients(m);
    bool unstable_seen = false;
    for (int k = 1; k < 8; ++k)
        if (c.b[k] * c.b[k] > c.a[k] * c.a[k]) unstable_seen = true;
    CHECK(unstable_seen);
    const auto modes = evolve_modes(c, 2.0);  // growth, but finite and physical
    for (int k = 1; k < 8; ++k) {
        CHECK(std::isfinite(modes.n[k]));
        CHECK(modes.n[k] >= 0.0);
        CHECK(std::abs(modes.n[k] * (modes.n[k] + 1.0) - std::norm(modes.m[k])) <
              1e-9 * (1.0 + modes.n[k]) * (1.0 + modes.n[k]));
    }
}
