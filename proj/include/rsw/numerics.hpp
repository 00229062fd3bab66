#ifndef RSW_NUMERICS_HPP
#define RSW_NUMERICS_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsw {

using complex = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// Raised when a computed quantity violates a physical validity bound
// (unphysical covariance, non-convergent propagation, ...). The CLI maps
// it to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Compensated (Kahan) accumulator. Sums over SW modes and correlation
// displacements go through this so emitted numbers do not depend on how
// work is chunked across workers.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// log C(n, k) for real n >= k >= 0; safe for n ~ 1e5 and beyond.
inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline bool is_half_integer(double x, double tol = 1e-9) {
    return std::abs(2.0 * x - std::round(2.0 * x)) < tol;
}

}  // namespace rsw

#endif
