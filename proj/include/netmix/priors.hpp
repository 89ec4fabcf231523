#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "netmix/network_model.hpp"
#include "netmix/random.hpp"

namespace netmix {

/**
 * Prior hyperparameters.
 *
 * p_Y(1) ~ Beta(a1, a0); Z_l ~ N(z_mean, z_var); X_vr ~ N(0, 1);
 * lambda_r = prod_{m <= r} 1 / theta_m with theta_1 ~ Gamma(mig_a1, 1) and
 * theta_m ~ Gamma(mig_a2, 1) for m >= 2; T ~ Bernoulli(prior_T1);
 * nu_y ~ Dirichlet(dirichlet_conc, ...), shared across groups when T = 0.
 */
struct HyperParameters {
    double a0 = 1.0;
    double a1 = 1.0;
    double z_mean = 0.0;
    double z_var = 10.0;
    double mig_a1 = 2.5;
    double mig_a2 = 3.5;
    std::optional<double> dirichlet_conc;  // defaults to 1 / H
    double prior_T1 = 0.5;
    std::size_t H = 15;
    std::size_t R = 10;
    std::size_t V = 0;  // taken from the data when zero

    double concentration() const { return dirichlet_conc.value_or(1.0 / static_cast<double>(H)); }
    void validate() const;
};

/// Multiplicative-inverse-gamma auxiliaries theta^(h), one length-R vector per component.
using MigAuxiliary = std::vector<Eigen::VectorXd>;

struct PriorDraw {
    MixtureParameters params;
    MigAuxiliary theta;
};

/// lambda_r = prod_{m <= r} theta_m^{-1}
Eigen::VectorXd mig_weights(const Eigen::VectorXd& theta);

PriorDraw sample_prior(const HyperParameters& hyper, Rng& rng);

/// Per-block log prior densities; total() is their sum.
struct PriorLogDensity {
    double p_y = 0.0;
    double z = 0.0;
    double x = 0.0;
    double theta = 0.0;
    double t = 0.0;
    double nu = 0.0;
    double total() const { return p_y + z + x + theta + t + nu; }
};

/// -inf marks a support violation (inconsistent lambda/theta, nu on the
/// simplex boundary, T = 0 with nu0 != nu1, impossible T).
PriorLogDensity log_prior_blocks(const MixtureParameters& params, const MigAuxiliary& theta,
                                 const HyperParameters& hyper);

double log_prior_density(const MixtureParameters& params, const MigAuxiliary& theta,
                         const HyperParameters& hyper);

double log_dirichlet_density(const Eigen::VectorXd& x, double concentration);
double log_gamma_density(double x, double shape);  // rate 1

}  // namespace netmix
