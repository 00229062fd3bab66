#include "rsw/spinwave.hpp"

#include <cmath>

namespace rsw::spinwave {

SWCoefficients coefficients(const lattice::LatticeModel& model) {
    const double s = model.spec.spin;
    const double delta = model.spec.delta;
    const int n = model.num_sites;
    SWCoefficients out;
    out.a.assign(n, 0.0);
    out.b.assign(n, 0.0);
    for (int k = 1; k < n; ++k) {
        const double jq = model.fourier[k];
        out.a[k] = s * (model.j0 - jq * (1.0 + delta) / 2.0);
        out.b[k] = -jq * s * (1.0 - delta) / 2.0;
    }
    return out;
}

ModeState evolve_mode(double a, double b, double t) {
    if (b == 0.0) return {};  // number-conserving mode stays in vacuum
    const double disc = a * a - b * b;
    double c, sn;  // C(t) and Sn(t) = "sin(w t)/w" on the proper branch
    const double scale = a * a + b * b;
    if (std::abs(disc) < 1e-12 * scale || std::abs(disc) * t * t < 1e-8) {
        // degenerate point / tiny argument: series in disc*t^2
        const double x = disc * t * t;
        sn = t * (1.0 - x / 6.0 + x * x / 120.0);
        c = 1.0 - x / 2.0 + x * x / 24.0;
    } else if (disc > 0.0) {
        const double w = std::sqrt(disc);
        c = std::cos(w * t);
        sn = std::sin(w * t) / w;
    } else {
        const double k = std::sqrt(-disc);
        c = std::cosh(k * t);
        sn = std::sinh(k * t) / k;
    }
    const complex u(c, -a * sn);
    const complex v(0.0, -b * sn);
    ModeState out;
    out.n = std::norm(v);
    out.m = u * v;
    return out;
}

SWModeSet evolve_modes(const SWCoefficients& coeffs, double t) {
    const int n = static_cast<int>(coeffs.a.size());
    SWModeSet out;
    out.time = t;
    out.n.assign(n, 0.0);
    out.m.assign(n, complex{0.0, 0.0});
    for (int k = 1; k < n; ++k) {
        const ModeState ms = evolve_mode(coeffs.a[k], coeffs.b[k], t);
        out.n[k] = ms.n;
        out.m[k] = ms.m;
    }
    return out;
}

double total_fm_population(const SWModeSet& modes) {
    KahanSum acc;
    for (size_t k = 1; k < modes.n.size(); ++k) acc.add(modes.n[k]);
    return acc.value();
}

double sw_energy(const SWCoefficients& coeffs, const SWModeSet& modes) {
    KahanSum acc;
    for (size_t k = 1; k < modes.n.size(); ++k) {
        acc.add(coeffs.a[k] * modes.n[k]);
        acc.add(coeffs.b[k] * modes.m[k].real());
    }
    return acc.value();
}

double GreenFunctions::trace_g(int num_sites) const {
    return g.empty() ? 0.0 : g[0] * num_sites;
}

GreenFunctions realspace_green(const SWModeSet& modes, const lattice::LatticeModel& model) {
    const int n = model.num_sites;
    const int L = model.spec.extent;
    const int d = model.spec.dimension;
    GreenFunctions out;
    out.g.assign(n, 0.0);
    out.f.assign(n, complex{0.0, 0.0});
    // n_q = n_{-q} and m_q = m_{-q}: the transforms reduce to cosine sums.
    for (int idx = 0; idx < n; ++idx) {
        int dx, dy;
        if (d == 1) {
            dx = idx;
            dy = 0;
        } else {
            dx = idx / L;
            dy = idx % L;
        }
        KahanSum sg, sfr, sfi;
        for (int k = 1; k < n; ++k) {
            int kx, ky;
            if (d == 1) {
                kx = k;
                ky = 0;
            } else {
                kx = k / L;
                ky = k % L;
            }
            const double phase = 2.0 * pi * (static_cast<double>(kx) * dx + static_cast<double>(ky) * dy) / L;
            const double cp = std::cos(phase);
            sg.add(modes.n[k] * cp);
            sfr.add(modes.m[k].real() * cp);
            sfi.add(modes.m[k].imag() * cp);
        }
        out.g[idx] = sg.value() / n;
        out.f[idx] = complex(sfr.value() / n, sfi.value() / n);
    }
    return out;
}

}  // namespace rsw::spinwave
