#include "netmix/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace netmix {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng substream(std::uint64_t key, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(key) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double uniform_open(Rng& rng) {
    boost::random::uniform_01<double> u;
    double x = u(rng);
    while (x <= 0.0)
        x = u(rng);
    return x;
}

double std_normal(Rng& rng) {
    boost::random::normal_distribution<double> n(0.0, 1.0);
    return n(rng);
}

double exponential(Rng& rng) {
    boost::random::exponential_distribution<double> e(1.0);
    return e(rng);
}

double gamma_variate(Rng& rng, double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma shape must be positive");
    if (shape >= 1.0) {
        boost::random::gamma_distribution<double> g(shape, 1.0);
        return g(rng);
    }
    return std::exp(log_gamma_variate(rng, shape));
}

double log_gamma_variate(Rng& rng, double shape) {
    if (!(shape > 0.0))
        throw std::invalid_argument("gamma shape must be positive");
    if (shape >= 1.0) {
        boost::random::gamma_distribution<double> g(shape, 1.0);
        return std::log(g(rng));
    }
    // G(a) = G(a + 1) * U^(1/a)
    boost::random::gamma_distribution<double> g(shape + 1.0, 1.0);
    const double lg = std::log(g(rng));
    return lg + std::log(uniform_open(rng)) / shape;
}

double beta_variate(Rng& rng, double a, double b) {
    const double la = log_gamma_variate(rng, a);
    const double lb = log_gamma_variate(rng, b);
    return 1.0 / (1.0 + std::exp(lb - la));
}

Eigen::VectorXd dirichlet(Rng& rng, const Eigen::VectorXd& alpha) {
    std::vector<double> logs(static_cast<std::size_t>(alpha.size()));
    for (Eigen::Index h = 0; h < alpha.size(); ++h)
        logs[h] = log_gamma_variate(rng, alpha[h]);
    const double norm = log_sum_exp(logs);
    Eigen::VectorXd out(alpha.size());
    for (Eigen::Index h = 0; h < alpha.size(); ++h)
        out[h] = std::exp(logs[h] - norm);
    return out / out.sum();
}

double log_sum_exp(std::span<const double> values) {
    const double m = values.empty() ? -std::numeric_limits<double>::infinity()
                                    : *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double v : values)
        s += std::exp(v - m);
    return m + std::log(s);
}

std::size_t categorical_log(Rng& rng, std::span<const double> log_weights) {
    const double norm = log_sum_exp(log_weights);
    if (!std::isfinite(norm))
        throw std::invalid_argument("categorical weights are all zero or not finite");
    const double target = uniform_open(rng);
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        const double p = std::exp(log_weights[k] - norm);
        if (p > 0.0)
            last = k;
        acc += p;
        if (target < acc)
            return k;
    }
    return last;
}

}  // namespace netmix
