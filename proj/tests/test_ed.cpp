#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "oracle_utils.hpp"
#include "rsw/ed.hpp"

using namespace rsw;
using namespace rsw::ed;

namespace {

lattice::LatticeModel make_model(int d, int L, double alpha, double delta = 0.0) {
    lattice::LatticeSpec s;
    s.dimension = d;
    s.extent = L;
    s.alpha = alpha;
    s.delta = delta;
    return lattice::build_model(s);
}

}  // namespace

TEST_CASE("two-spin XX spectrum: {-J/2, +J/2, 0, 0}") {
    const auto m = make_model(1, 2, 0.0);
    SectorHamiltonian ham(m);
    std::vector<double> eigs;
    for (int nup = 0; nup <= 2; ++nup) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ham.dense(nup));
        for (int k = 0; k < es.eigenvalues().size(); ++k) eigs.push_back(es.eigenvalues()(k));
    }
    std::sort(eigs.begin(), eigs.end());
    CHECK(eigs[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(eigs[1] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(eigs[2] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(eigs[3] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("sector blocks match the dense Kronecker construction, N <= 6") {
    for (int n : {3, 4, 6}) {
        const auto m = make_model(1, n, 2.0, 0.3);
        SectorHamiltonian ham(m);
        const auto dense = rsw_test::dense_xxz(m.couplings, m.spec.delta);
        for (int nup = 0; nup <= n; ++nup) {
            const auto& basis = ham.basis(nup);
            const auto block = ham.dense(nup);
            for (size_t r = 0; r < basis.size(); ++r)
                for (size_t c = 0; c < basis.size(); ++c)
                    CHECK(block(r, c) ==
                          doctest::Approx(dense(basis[r], basis[c])).epsilon(1e-12));
        }
        // off-sector elements of the dense matrix vanish (U(1) block structure)
        for (int r = 0; r < (1 << n); ++r)
            for (int c = 0; c < (1 << n); ++c)
                if (std::popcount(static_cast<unsigned>(r)) !=
                    std::popcount(static_cast<unsigned>(c)))
                    CHECK(dense(r, c) == 0.0);
    }
}

TEST_CASE("CSS_x is an eigenstate of the delta=1 infinite-range model") {
    const int n = 4;
    const auto m = make_model(1, n, 0.0, 1.0);
    SectorHamiltonian ham(m);
    const auto css = css_x_state(n);
    // H|CSS> = E|CSS> with E = -(J/2)[Jt(Jt+1) - 3N/4], Jt = N/2
    const double jt = n / 2.0;
    const double e = -0.5 * (jt * (jt + 1.0) - 0.75 * n);
    std::vector<complex> out(css.amp.size());
    for (int nup = 0; nup <= n; ++nup) {
        const auto& basis = ham.basis(nup);
        std::vector<complex> in(basis.size()), res(basis.size());
        for (size_t k = 0; k < basis.size(); ++k) in[k] = css.amp[basis[k]];
        ham.apply(nup, std::span<const complex>(in), std::span<complex>(res));
        for (size_t k = 0; k < basis.size(); ++k) out[basis[k]] = res[k];
    }
    for (size_t s = 0; s < css.amp.size(); ++s)
        CHECK(std::abs(out[s] - e * css.amp[s]) < 1e-12);

    // eigenstate input -> constant observables under evolution
    Evolver ev(ham, EvolveMethod::FullDiag);
    const auto evolved = ev.evolve(css, 2.3);
    const auto rec = exact_observables(evolved, m);
    CHECK(rec.jx_mean == doctest::Approx(n / 2.0).epsilon(1e-10));
    CHECK(rec.xi2 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("t = 0 evolution is the identity") {
    const auto m = make_model(1, 6, 3.0);
    SectorHamiltonian ham(m);
    const auto css = css_x_state(6);
    const auto out = evolve_exact(css, ham, 0.0);
    for (size_t s = 0; s < css.amp.size(); ++s) CHECK(out.amp[s] == css.amp[s]);
}

TEST_CASE("unitarity and sector-norm conservation") {
    const auto m = make_model(1, 8, 3.0, 0.4);
    SectorHamiltonian ham(m);
    const auto css = css_x_state(8);
    const auto norms0 = css.sector_norms(ham);
    for (auto method : {EvolveMethod::FullDiag, EvolveMethod::Krylov}) {
        const auto out = evolve_exact(css, ham, 1.7, method);
        CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-10));
        const auto norms = out.sector_norms(ham);
        for (size_t k = 0; k < norms.size(); ++k)
            CHECK(norms[k] == doctest::Approx(norms0[k]).epsilon(1e-10));
    }
}

TEST_CASE("full-diag and Krylov evolutions agree to 1e-9 on <J^x> (N=12, 1d dipolar)") {
    const auto m = make_model(1, 12, 3.0);
    SectorHamiltonian ham(m);
    Evolver full(ham, EvolveMethod::FullDiag, 2);
    Evolver krylov(ham, EvolveMethod::Krylov, 2);
    auto a = css_x_state(12);
    auto b = css_x_state(12);
    const double dt = 0.25;
    for (int step = 1; step <= 4; ++step) {
        a = full.evolve(a, dt);
        b = krylov.evolve(b, dt);
        const auto ra = exact_observables(a, m);
        const auto rb = exact_observables(b, m);
        CHECK(std::abs(ra.jx_mean - rb.jx_mean) < 1e-9);
        CHECK(std::abs(ra.jx_var - rb.jx_var) < 1e-8);
    }
}

TEST_CASE("exact observables of the product state") {
    const auto m = make_model(2, 4, 3.0);
    const auto css = css_x_state(16);
    const auto rec = exact_observables(css, m);
    CHECK(rec.jx_mean == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(rec.xi2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rec.jz_mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rec.jz_var == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("Var(J^z) = N/4 along exact evolution") {
    const auto m = make_model(1, 10, 1.5);
    SectorHamiltonian ham(m);
    Evolver ev(ham, EvolveMethod::Auto, 2);
    auto st = css_x_state(10);
    for (int k = 0; k < 3; ++k) {
        st = ev.evolve(st, 0.4);
        const auto rec = exact_observables(st, m);
        CHECK(rec.jz_var == doctest::Approx(2.5).epsilon(1e-9));
        CHECK(std::abs(rec.jz_mean) < 1e-10);
    }
}

TEST_CASE("region Renyi-2 against an independent dense partial trace (N=6)") {
    const auto m = make_model(1, 6, 2.0);
    SectorHamiltonian ham(m);
    auto st = css_x_state(6);
    st = evolve_exact(st, ham, 0.9);
    EDObservablesOptions opts;
    opts.entropy = true;
    opts.entropy_region = {0, 1, 2};
    const auto rec = exact_observables(st, m, opts);

    // dense route: full density matrix, trace out sites 3,4,5
    Eigen::MatrixXcd rho_a = Eigen::MatrixXcd::Zero(8, 8);
    for (int a = 0; a < 8; ++a)
        for (int ap = 0; ap < 8; ++ap)
            for (int b = 0; b < 8; ++b) {
                const int s1 = a | (b << 3);
                const int s2 = ap | (b << 3);
                rho_a(a, ap) += st.amp[s1] * std::conj(st.amp[s2]);
            }
    const double s2_dense = -std::log(rho_a.squaredNorm());
    CHECK(rec.s2_total == doctest::Approx(s2_dense).epsilon(1e-10));
}

TEST_CASE("correlation maps: sum rule and symmetry (N=8 exact)") {
    const auto m = make_model(1, 8, 3.0);
    SectorHamiltonian ham(m);
    auto st = css_x_state(8);
    st = evolve_exact(st, ham, 0.8);
    EDObservablesOptions opts;
    opts.correlations = true;
    const auto rec = exact_observables(st, m, opts);
    KahanSum zz;
    for (const auto& e : rec.czz) zz.add(e.total);
    CHECK(8.0 * zz.value() == doctest::Approx(2.0).epsilon(1e-9));  // N Sum C^zz = N/4
    for (int d = 1; d < 8; ++d) {
        CHECK(rec.czz[d].total == doctest::Approx(rec.czz[8 - d].total).epsilon(1e-10));
        CHECK(rec.cyy[d].total == doctest::Approx(rec.cyy[8 - d].total).epsilon(1e-10));
    }
}

TEST_CASE("tower fit on the infinite-range XX model is exactly quadratic") {
    const auto m = make_model(1, 8, 0.0);
    const auto fit = fit_tower(m, -1, 2);
    CHECK(fit.quadratic);
    CHECK(fit.rel_residual < 1e-12);
    CHECK(fit.i_tos == doctest::Approx(rotor::bare_inertia(m)).epsilon(1e-10));  // = 1/J
}

TEST_CASE("tower fit window control") {
    const auto m = make_model(1, 8, 0.0);
    const auto full = fit_tower(m, -1, 2);
    const auto short_fit = fit_tower(m, 2, 2);
    CHECK(full.jz_values.size() == 5);   // J^z = 0..4
    CHECK(short_fit.jz_values.size() == 3);
    CHECK(short_fit.i_tos == doctest::Approx(full.i_tos).epsilon(1e-10));  // exact ToS
}

TEST_CASE("size cap and spin guard") {
    lattice::LatticeSpec s;
    s.dimension = 1;
    s.extent = 21;
    s.alpha = 1.0;
    const auto m = lattice::build_model(s);
    CHECK_THROWS_AS(SectorHamiltonian{m}, std::invalid_argument);
    lattice::LatticeSpec s2;
    s2.dimension = 1;
    s2.extent = 4;
    s2.alpha = 1.0;
    s2.spin = 1.0;
    const auto m2 = lattice::build_model(s2);
    CHECK_THROWS_AS(SectorHamiltonian{m2}, std::invalid_argument);
}
