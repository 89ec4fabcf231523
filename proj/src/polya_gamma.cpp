#include "netmix/polya_gamma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace netmix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;

double log_std_normal_cdf(double x) {
    return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

// n-th coefficient of the alternating series for the J*(1, z) density ratio.
double series_term(int n, double x) {
    const double k = n + 0.5;
    if (x > kTrunc)
        return kPi * k * std::exp(-0.5 * k * k * kPi * kPi * x);
    return kPi * k * std::exp(-1.5 * (std::log(0.5 * kPi) + std::log(x)) - 2.0 * k * k / x);
}

// Probability of proposing from the exponential tail, for half-tilt z.
double exponential_mass(double z) {
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double b = std::sqrt(1.0 / kTrunc) * (kTrunc * z - 1.0);
    const double a = -std::sqrt(1.0 / kTrunc) * (kTrunc * z + 1.0);
    const double x0 = std::log(fz) + fz * kTrunc;
    const double xb = x0 - z + log_std_normal_cdf(b);
    const double xa = x0 + z + log_std_normal_cdf(a);
    const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
    return 1.0 / (1.0 + q_over_p);
}

// Inverse Gaussian IG(1/z, 1) restricted to (0, t).
double truncated_inverse_gaussian(double z, Rng& rng) {
    if (z < 1.0 / kTrunc) {
        // mean beyond the truncation point: propose from the z = 0 limit, accept with exp(-z^2 x / 2)
        for (;;) {
            double e1 = exponential(rng), e2 = exponential(rng);
            while (e1 * e1 > 2.0 * e2 / kTrunc) {
                e1 = exponential(rng);
                e2 = exponential(rng);
            }
            const double x = kTrunc / ((1.0 + kTrunc * e1) * (1.0 + kTrunc * e1));
            if (uniform_open(rng) <= std::exp(-0.5 * z * z * x))
                return x;
        }
    }
    const double mu = 1.0 / z;
    double x = kTrunc + 1.0;
    while (x > kTrunc) {
        const double y0 = std_normal(rng);
        const double y = y0 * y0;
        x = mu + 0.5 * mu * mu * y - 0.5 * mu * std::sqrt(4.0 * mu * y + (mu * y) * (mu * y));
        if (uniform_open(rng) > mu / (mu + x))
            x = mu * mu / x;
    }
    return x;
}

}  // namespace

double polya_gamma_draw(double c, Rng& rng) {
    if (!std::isfinite(c))
        throw std::invalid_argument("Polya-Gamma tilt must be finite");
    // PG(1, c) = J*(1, |c| / 2) / 4
    const double z = 0.5 * std::abs(c);
    const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
    const double mass = exponential_mass(z);
    for (;;) {
        const double x = uniform_open(rng) < mass ? kTrunc + exponential(rng) / fz
                                                  : truncated_inverse_gaussian(z, rng);
        double s = series_term(0, x);
        const double y = uniform_open(rng) * s;
        for (int n = 1;; ++n) {
            if (n % 2 == 1) {
                s -= series_term(n, x);
                if (y <= s)
                    return 0.25 * x;
            } else {
                s += series_term(n, x);
                if (y > s)
                    break;
            }
        }
    }
}

double polya_gamma_mean(double c) {
    if (std::abs(c) < 1e-6)
        return 0.25 - c * c / 48.0;
    return std::tanh(0.5 * c) / (2.0 * c);
}

}  // namespace netmix
