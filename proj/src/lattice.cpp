#include "rsw/lattice.hpp"

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "rsw/numerics.hpp"

namespace rsw::lattice {

std::string to_string(DistanceConvention c) {
    return c == DistanceConvention::MinimumImage ? "minimum-image" : "image-summed";
}

DistanceConvention convention_from_string(const std::string& s) {
    if (s == "minimum-image") return DistanceConvention::MinimumImage;
    if (s == "image-summed") return DistanceConvention::ImageSummed;
    throw std::invalid_argument("unknown distance convention: " + s);
}

int LatticeSpec::sites() const {
    int n = extent;
    for (int k = 1; k < dimension; ++k) n *= extent;
    return n;
}

void LatticeSpec::validate() const {
    std::ostringstream err;
    int count = 0;
    auto fail = [&](const std::string& msg) {
        if (count++) err << "; ";
        err << msg;
    };
    if (dimension != 1 && dimension != 2) fail("dimension must be 1 or 2");
    if (extent < 2) fail("extent must give N >= 2 sites");
    if (alpha < 0.0) fail("alpha must be >= 0");
    if (coupling <= 0.0) fail("coupling J must be positive");
    if (spin <= 0.0 || !is_half_integer(spin)) fail("spin must be a positive half-integer");
    if (convention == DistanceConvention::ImageSummed && alpha <= dimension)
        fail("image-summed convention requires alpha > dimension (series convergence)");
    if (count) throw std::invalid_argument("invalid lattice spec: " + err.str());
}

int LatticeModel::index(int x, int y) const {
    const int L = spec.extent;
    return spec.dimension == 1 ? x : x * L + y;
}

std::array<int, 2> LatticeModel::coords(int idx) const {
    const int L = spec.extent;
    if (spec.dimension == 1) return {idx, 0};
    return {idx / L, idx % L};
}

int LatticeModel::displacement_index(int i, int j) const {
    const int L = spec.extent;
    const auto a = coords(i);
    const auto b = coords(j);
    const int dx = ((b[0] - a[0]) % L + L) % L;
    const int dy = ((b[1] - a[1]) % L + L) % L;
    return index(dx, dy);
}

int LatticeModel::negate(int idx) const {
    const int L = spec.extent;
    const auto c = coords(idx);
    return index((L - c[0]) % L, (L - c[1]) % L);
}

std::array<double, 2> LatticeModel::momentum(int idx) const {
    const int L = spec.extent;
    const auto c = coords(idx);
    auto fold = [&](int n) {
        double q = 2.0 * pi * n / L;
        return q > pi + 1e-12 ? q - 2.0 * pi : q;
    };
    return {fold(c[0]), spec.dimension == 2 ? fold(c[1]) : 0.0};
}

namespace {

// Gamma(a, x) for a <= 1, x > 0; descends from a positive-order start (or
// from Gamma(0, x) = E_1(x) at integer orders).
double upper_gamma_descend(double a, double x) {
    if (a > 1e-12) return boost::math::tgamma(a, x);
    double s, g;
    int steps;
    const double frac = a - std::floor(a);
    if (frac < 1e-9 || frac > 1.0 - 1e-9) {
        s = 0.0;
        g = boost::math::expint(1, x);
        steps = static_cast<int>(std::llround(-a));
    } else {
        s = frac;
        g = boost::math::tgamma(frac, x);
        steps = static_cast<int>(std::llround(s - a));
    }
    const double emx = std::exp(-x);
    for (int k = 0; k < steps; ++k) {
        const double sm1 = s - 1.0;
        g = (g - std::pow(x, sm1) * emx) / sm1;
        s = sm1;
    }
    return g;
}

double direct_window_sum(int d, double alpha, const std::array<double, 2>& u, int w) {
    KahanSum acc;
    if (d == 1) {
        for (int n = -w; n <= w; ++n) {
            const double v = u[0] + n;
            acc.add(std::pow(v * v, -alpha / 2.0));
        }
    } else {
        for (int nx = -w; nx <= w; ++nx)
            for (int ny = -w; ny <= w; ++ny) {
                const double vx = u[0] + nx;
                const double vy = u[1] + ny;
                acc.add(std::pow(vx * vx + vy * vy, -alpha / 2.0));
            }
    }
    return acc.value();
}

}  // namespace

double periodic_power_sum(int d, double alpha, const std::array<double, 2>& u) {
    if (alpha <= d) throw std::invalid_argument("periodic_power_sum requires alpha > dimension");
    // steep decay: nearest images dominate beyond machine precision
    if (alpha > 60.0) return direct_window_sum(d, alpha, u, 3);

    const double eta = pi;
    double nu = 0.5 * (alpha - d);
    if (std::abs(nu - std::round(nu)) < 1e-6) nu = std::round(nu);  // ill-conditioned band
    const double gam_half = std::tgamma(alpha / 2.0);
    const int w = 6;

    KahanSum real_part;
    if (d == 1) {
        for (int n = -w; n <= w; ++n) {
            const double v2 = (u[0] + n) * (u[0] + n);
            real_part.add(boost::math::tgamma(alpha / 2.0, eta * v2) *
                          std::pow(v2, -alpha / 2.0));
        }
    } else {
        for (int nx = -w; nx <= w; ++nx)
            for (int ny = -w; ny <= w; ++ny) {
                const double vx = u[0] + nx;
                const double vy = u[1] + ny;
                const double v2 = vx * vx + vy * vy;
                real_part.add(boost::math::tgamma(alpha / 2.0, eta * v2) *
                              std::pow(v2, -alpha / 2.0));
            }
    }

    KahanSum recip_part;
    recip_part.add(std::pow(eta, nu) / nu);  // m = 0
    auto recip_term = [&](double m2, double phase_dot) {
        const double x = pi * pi * m2 / eta;
        const double t = std::pow(pi * pi * m2, nu) * upper_gamma_descend(-nu, x);
        recip_part.add(t * std::cos(2.0 * pi * phase_dot));
    };
    if (d == 1) {
        for (int m = -w; m <= w; ++m) {
            if (m == 0) continue;
            recip_term(static_cast<double>(m) * m, m * u[0]);
        }
    } else {
        for (int mx = -w; mx <= w; ++mx)
            for (int my = -w; my <= w; ++my) {
                if (mx == 0 && my == 0) continue;
                recip_term(static_cast<double>(mx) * mx + static_cast<double>(my) * my,
                           mx * u[0] + my * u[1]);
            }
    }

    return (real_part.value() + std::pow(pi, d / 2.0) * recip_part.value()) / gam_half;
}

namespace {

std::vector<double> couplings_by_displacement(const LatticeSpec& spec) {
    const int L = spec.extent;
    const int n = spec.sites();
    std::vector<double> jd(n, 0.0);
    for (int idx = 1; idx < n; ++idx) {
        int dx, dy;
        if (spec.dimension == 1) {
            dx = idx;
            dy = 0;
        } else {
            dx = idx / L;
            dy = idx % L;
        }
        if (spec.alpha == 0.0) {
            jd[idx] = spec.coupling;  // literal infinite range
            continue;
        }
        if (spec.convention == DistanceConvention::MinimumImage) {
            const double mx = std::min(dx, L - dx);
            const double my = std::min(dy, L - dy);
            const double r2 = mx * mx + my * my;
            jd[idx] = spec.coupling * std::pow(r2, -spec.alpha / 2.0);
        } else {
            const std::array<double, 2> u = {static_cast<double>(dx) / L,
                                             static_cast<double>(dy) / L};
            jd[idx] = spec.coupling * std::pow(static_cast<double>(L), -spec.alpha) *
                      periodic_power_sum(spec.dimension, spec.alpha, u);
        }
    }
    return jd;
}

// J_q = sum_d e^{-iq.d} J(d); enforces the reality of the transform.
std::vector<double> fourier_of_displacements(const std::vector<double>& jd, int dimension,
                                             int L) {
    const int n = static_cast<int>(jd.size());
    std::vector<double> jq(n, 0.0);
    double max_abs = 0.0;
    for (double v : jd) max_abs = std::max(max_abs, std::abs(v));
    double worst_imag = 0.0;
    for (int k = 0; k < n; ++k) {
        int kx, ky;
        if (dimension == 1) {
            kx = k;
            ky = 0;
        } else {
            kx = k / L;
            ky = k % L;
        }
        const double qx = 2.0 * pi * kx / L;
        const double qy = 2.0 * pi * ky / L;
        KahanSum re, im;
        for (int idx = 0; idx < n; ++idx) {
            if (jd[idx] == 0.0) continue;
            int dx, dy;
            if (dimension == 1) {
                dx = idx;
                dy = 0;
            } else {
                dx = idx / L;
                dy = idx % L;
            }
            const double phase = qx * dx + qy * dy;
            re.add(jd[idx] * std::cos(phase));
            im.add(-jd[idx] * std::sin(phase));
        }
        jq[k] = re.value();
        worst_imag = std::max(worst_imag, std::abs(im.value()));
    }
    const double j0 = jq[0];
    if (worst_imag > 1e-10 * std::max(std::abs(j0), n * max_abs))
        throw NumericError("lattice Fourier transform acquired an imaginary part (" +
                           std::to_string(worst_imag) + "); lattice not inversion symmetric");
    return jq;
}

}  // namespace

LatticeModel build_model(const LatticeSpec& spec) {
    spec.validate();
    LatticeModel model;
    model.spec = spec;
    model.num_sites = spec.sites();
    model.coupling_by_disp = couplings_by_displacement(spec);

    const int n = model.num_sites;
    model.couplings = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            model.couplings(i, j) = model.coupling_by_disp[model.displacement_index(i, j)];
        }

    model.fourier = fourier_of_displacements(model.coupling_by_disp, spec.dimension, spec.extent);
    model.j0 = model.fourier[0];
    return model;
}

std::vector<double> fourier_couplings(const Eigen::MatrixXd& couplings, int dimension,
                                      int extent) {
    const int n = static_cast<int>(couplings.rows());
    LatticeSpec probe;
    probe.dimension = dimension;
    probe.extent = extent;
    if (probe.sites() != n || couplings.cols() != n)
        throw std::invalid_argument("coupling matrix size does not match lattice extent");

    LatticeModel geom;  // index helpers only
    geom.spec = probe;
    geom.num_sites = n;

    double scale = couplings.cwiseAbs().maxCoeff();
    if (scale == 0.0) scale = 1.0;
    std::vector<double> jd(n, 0.0);
    for (int j = 1; j < n; ++j) jd[geom.displacement_index(0, j)] = couplings(0, j);
    for (int i = 0; i < n; ++i) {
        if (couplings(i, i) != 0.0)
            throw std::invalid_argument("coupling matrix must have zero diagonal");
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (std::abs(couplings(i, j) - couplings(j, i)) > 1e-9 * scale)
                throw std::invalid_argument("coupling matrix must be symmetric");
            const double expect = jd[geom.displacement_index(i, j)];
            if (std::abs(couplings(i, j) - expect) > 1e-9 * scale)
                throw std::invalid_argument(
                    "coupling matrix is not translation invariant (row-spectrum mismatch)");
        }
    }
    return fourier_of_displacements(jd, dimension, extent);
}

}  // namespace rsw::lattice
