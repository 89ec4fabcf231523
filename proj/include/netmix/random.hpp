#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Core>

namespace netmix {

using Rng = std::mt19937_64;

/// Independent engine for unit `index` under `key`. Used wherever work is
/// split across subjects so results do not depend on the thread count.
Rng substream(std::uint64_t key, std::uint64_t index);

double uniform_open(Rng& rng);  // (0, 1)
double std_normal(Rng& rng);
double exponential(Rng& rng);  // rate 1

/// Gamma(shape, rate 1).
double gamma_variate(Rng& rng, double shape);

/// log of a Gamma(shape, rate 1) draw; stays finite for very small shapes.
double log_gamma_variate(Rng& rng, double shape);

double beta_variate(Rng& rng, double a, double b);

/// Dirichlet draw normalized in log space.
Eigen::VectorXd dirichlet(Rng& rng, const Eigen::VectorXd& alpha);

/// Index drawn with probability proportional to exp(log_weights).
std::size_t categorical_log(Rng& rng, std::span<const double> log_weights);

double log_sum_exp(std::span<const double> values);

}  // namespace netmix
