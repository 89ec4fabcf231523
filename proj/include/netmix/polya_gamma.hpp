#pragma once

#include "netmix/random.hpp"

namespace netmix {

/**
 * Exact draw from PG(1, c).
 *
 * Accept/reject against a mixture of a truncated exponential (right of
 * t = 0.64) and a truncated inverse Gaussian (left of t), with the
 * acceptance decided by the alternating series for the Jacobi density.
 * No series truncation is involved.
 */
double polya_gamma_draw(double c, Rng& rng);

/// E[PG(1, c)] = tanh(c / 2) / (2 c), with limit 1/4 at c = 0.
double polya_gamma_mean(double c);

}  // namespace netmix
