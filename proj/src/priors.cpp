#include "netmix/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace netmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x))
        throw std::invalid_argument(fmt::format("hyperparameter {} = {} must be positive", name, x));
}

}  // namespace

void HyperParameters::validate() const {
    require_positive(a0, "a0");
    require_positive(a1, "a1");
    require_positive(z_var, "z_var");
    require_positive(mig_a1, "mig_a1");
    require_positive(mig_a2, "mig_a2");
    if (!std::isfinite(z_mean))
        throw std::invalid_argument("hyperparameter z_mean must be finite");
    if (H < 1)
        throw std::invalid_argument("hyperparameter H must be at least 1");
    if (R < 1)
        throw std::invalid_argument("hyperparameter R must be at least 1");
    require_positive(concentration(), "dirichlet_conc");
    // 0 and 1 are accepted as degenerate priors that fix T
    if (!(prior_T1 >= 0.0 && prior_T1 <= 1.0))
        throw std::invalid_argument(fmt::format("hyperparameter prior_T1 = {} outside [0, 1]", prior_T1));
}

Eigen::VectorXd mig_weights(const Eigen::VectorXd& theta) {
    Eigen::VectorXd lambda(theta.size());
    double log_cum = 0.0;
    for (Eigen::Index r = 0; r < theta.size(); ++r) {
        log_cum -= std::log(theta[r]);
        lambda[r] = std::exp(log_cum);
    }
    return lambda;
}

PriorDraw sample_prior(const HyperParameters& hyper, Rng& rng) {
    hyper.validate();
    if (hyper.V < 2)
        throw std::invalid_argument("sample_prior needs V >= 2");
    const std::size_t L = EdgeIndexMap::edge_count(hyper.V);
    const auto V = static_cast<Eigen::Index>(hyper.V);
    const auto R = static_cast<Eigen::Index>(hyper.R);

    PriorDraw d;
    auto& p = d.params;
    p.pY1 = beta_variate(rng, hyper.a1, hyper.a0);

    const double z_sd = std::sqrt(hyper.z_var);
    p.Z.resize(static_cast<Eigen::Index>(L));
    for (Eigen::Index l = 0; l < p.Z.size(); ++l)
        p.Z[l] = hyper.z_mean + z_sd * std_normal(rng);

    for (std::size_t h = 0; h < hyper.H; ++h) {
        Eigen::VectorXd theta(R);
        for (Eigen::Index r = 0; r < R; ++r)
            theta[r] = gamma_variate(rng, r == 0 ? hyper.mig_a1 : hyper.mig_a2);
        ComponentFactors f;
        f.X.resize(V, R);
        for (Eigen::Index r = 0; r < R; ++r)
            for (Eigen::Index v = 0; v < V; ++v)
                f.X(v, r) = std_normal(rng);
        f.lambda = mig_weights(theta);
        p.components.push_back(std::move(f));
        d.theta.push_back(std::move(theta));
    }

    p.T = uniform_open(rng) < hyper.prior_T1 ? 1 : 0;
    const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(hyper.H),
                                                            hyper.concentration());
    p.nu0 = dirichlet(rng, alpha);
    p.nu1 = p.T == 1 ? dirichlet(rng, alpha) : p.nu0;
    return d;
}

double log_gamma_density(double x, double shape) {
    if (!(x > 0.0))
        return kNegInf;
    return (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
}

double log_dirichlet_density(const Eigen::VectorXd& x, double concentration) {
    const double H = static_cast<double>(x.size());
    double out = std::lgamma(H * concentration) - H * std::lgamma(concentration);
    for (Eigen::Index h = 0; h < x.size(); ++h) {
        if (!(x[h] > 0.0))
            return kNegInf;
        out += (concentration - 1.0) * std::log(x[h]);
    }
    return out;
}

PriorLogDensity log_prior_blocks(const MixtureParameters& params, const MigAuxiliary& theta,
                                 const HyperParameters& hyper) {
    if (params.mixture_size() != hyper.H || params.rank() != hyper.R || theta.size() != hyper.H)
        throw std::invalid_argument(fmt::format(
            "parameter dimensions (H={}, R={}, aux={}) do not match hyperparameters (H={}, R={})",
            params.mixture_size(), params.rank(), theta.size(), hyper.H, hyper.R));
    PriorLogDensity out;
    const double p = params.pY1;
    if (p > 0.0 && p < 1.0)
        out.p_y = (hyper.a1 - 1.0) * std::log(p) + (hyper.a0 - 1.0) * std::log1p(-p) -
                  (std::lgamma(hyper.a1) + std::lgamma(hyper.a0) - std::lgamma(hyper.a0 + hyper.a1));
    else
        out.p_y = kNegInf;

    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * hyper.z_var);
    for (Eigen::Index l = 0; l < params.Z.size(); ++l) {
        const double d = params.Z[l] - hyper.z_mean;
        out.z += log_norm - 0.5 * d * d / hyper.z_var;
    }

    const double log_std = -0.5 * std::log(2.0 * std::numbers::pi);
    for (std::size_t h = 0; h < params.mixture_size(); ++h) {
        const auto& c = params.components[h];
        out.x += static_cast<double>(c.X.size()) * log_std - 0.5 * c.X.squaredNorm();
        const auto& th = theta[h];
        if (static_cast<std::size_t>(th.size()) != hyper.R)
            throw std::invalid_argument(fmt::format("theta[{}] has length {}", h, th.size()));
        for (Eigen::Index r = 0; r < th.size(); ++r)
            out.theta += log_gamma_density(th[r], r == 0 ? hyper.mig_a1 : hyper.mig_a2);
        const Eigen::VectorXd implied = mig_weights(th);
        for (Eigen::Index r = 0; r < th.size(); ++r)
            if (std::abs(implied[r] - c.lambda[r]) > 1e-9 * std::max(1.0, std::abs(implied[r])))
                out.theta = kNegInf;
    }

    if (params.T == 1)
        out.t = hyper.prior_T1 > 0.0 ? std::log(hyper.prior_T1) : kNegInf;
    else
        out.t = hyper.prior_T1 < 1.0 ? std::log1p(-hyper.prior_T1) : kNegInf;

    const double conc = hyper.concentration();
    if (params.T == 1) {
        out.nu = log_dirichlet_density(params.nu0, conc) + log_dirichlet_density(params.nu1, conc);
    } else {
        out.nu = params.nu0 == params.nu1 ? log_dirichlet_density(params.nu0, conc) : kNegInf;
    }
    return out;
}

double log_prior_density(const MixtureParameters& params, const MigAuxiliary& theta,
                         const HyperParameters& hyper) {
    return log_prior_blocks(params, theta, hyper).total();
}

}  // namespace netmix
