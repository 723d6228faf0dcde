#include "subsel/special.hpp"

#include "subsel/errors.hpp"

#include <cmath>
#include <limits>

namespace subsel {

namespace {

// Continued fraction for the regularized incomplete beta (Lentz's method).
double beta_cf(double a, double b, double z) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * z / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * z / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * z / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw numeric_error("incomplete beta: continued fraction did not converge");
}

void check_args(double z, double a, double b) {
    if (!(z >= 0.0 && z <= 1.0)) throw config_error("incomplete beta: z must lie in [0,1]");
    if (!(a > 0.0) || !(b > 0.0)) throw config_error("incomplete beta: a and b must be positive");
}

} // namespace

double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double regularized_incomplete_beta(double z, double a, double b) {
    check_args(z, a, b);
    if (z == 0.0) return 0.0;
    if (z == 1.0) return 1.0;
    const double log_front =
        a * std::log(z) + b * std::log1p(-z) - log_beta(a, b);
    const double front = std::exp(log_front);
    // Use the symmetry I_z(a,b) = 1 - I_{1-z}(b,a) to keep the CF convergent.
    if (z < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, z) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - z) / b;
}

double incomplete_beta(double z, double a, double b) {
    return regularized_incomplete_beta(z, a, b) * std::exp(log_beta(a, b));
}

double log_incomplete_beta(double z, double a, double b) {
    const double reg = regularized_incomplete_beta(z, a, b);
    if (reg <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(reg) + log_beta(a, b);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / 1.4142135623730950488016887242097);
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("normal_quantile: p must lie in (0,1)");
    // Bisection on the CDF; erfc gives ~1e-15 accuracy, far more than needed.
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace subsel
