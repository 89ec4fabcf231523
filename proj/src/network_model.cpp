#include "netmix/network_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace netmix {

namespace {

constexpr double kSimplexTolerance = 1e-10;

void check_weights(const Eigen::VectorXd& nu, std::size_t H, const char* name) {
    if (static_cast<std::size_t>(nu.size()) != H)
        throw std::invalid_argument(fmt::format("{} has length {}, expected {}", name, nu.size(), H));
    for (Eigen::Index h = 0; h < nu.size(); ++h)
        if (!(nu[h] >= 0.0) || !std::isfinite(nu[h]))
            throw std::invalid_argument(fmt::format("{}[{}] = {} is not a valid weight", name, h, nu[h]));
    if (std::abs(nu.sum() - 1.0) > kSimplexTolerance)
        throw std::invalid_argument(fmt::format("{} sums to {}, not 1", name, nu.sum()));
}

}  // namespace

std::size_t MixtureParameters::nodes() const {
    return EdgeIndexMap::nodes_for_edges(edges());
}

std::size_t MixtureParameters::rank() const {
    return components.empty() ? 0 : static_cast<std::size_t>(components.front().lambda.size());
}

void MixtureParameters::validate() const {
    if (components.empty())
        throw std::invalid_argument("mixture needs at least one component");
    const std::size_t V = nodes();
    const std::size_t R = rank();
    for (std::size_t h = 0; h < components.size(); ++h) {
        const auto& c = components[h];
        if (static_cast<std::size_t>(c.X.rows()) != V || static_cast<std::size_t>(c.X.cols()) != R ||
            static_cast<std::size_t>(c.lambda.size()) != R)
            throw std::invalid_argument(fmt::format(
                "component {} has X {}x{} and lambda {}, expected {}x{} and {}", h, c.X.rows(),
                c.X.cols(), c.lambda.size(), V, R, R));
        for (Eigen::Index r = 0; r < c.lambda.size(); ++r)
            if (!(c.lambda[r] >= 0.0) || !std::isfinite(c.lambda[r]))
                throw std::invalid_argument(
                    fmt::format("component {} weight lambda[{}] = {} is invalid", h, r, c.lambda[r]));
    }
    check_weights(nu0, components.size(), "nu0");
    check_weights(nu1, components.size(), "nu1");
    if (T != 0 && T != 1)
        throw std::invalid_argument(fmt::format("hypothesis indicator T = {} must be 0 or 1", T));
    if (T == 0 && nu0 != nu1)
        throw std::invalid_argument("T = 0 requires nu0 == nu1");
    if (!(pY1 > 0.0 && pY1 < 1.0))
        throw std::invalid_argument(fmt::format("pY1 = {} must lie in (0, 1)", pY1));
}

double logistic(double s) {
    if (s >= 0.0)
        return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

double log_logistic(double s) {
    if (s >= 0.0)
        return -std::log1p(std::exp(-s));
    return s - std::log1p(std::exp(s));
}

EdgeProbabilityVector EdgeProbabilityVector::from_logits(Eigen::VectorXd logits) {
    for (Eigen::Index l = 0; l < logits.size(); ++l)
        if (!std::isfinite(logits[l]))
            throw std::invalid_argument(fmt::format("similarity S[{}] = {} is not finite", l, logits[l]));
    return EdgeProbabilityVector(std::move(logits));
}

EdgeProbabilityVector EdgeProbabilityVector::from_probabilities(std::span<const double> pi) {
    Eigen::VectorXd logits(static_cast<Eigen::Index>(pi.size()));
    for (std::size_t l = 0; l < pi.size(); ++l) {
        if (!(pi[l] > 0.0 && pi[l] < 1.0))
            throw std::invalid_argument(fmt::format("edge probability pi[{}] = {} outside (0, 1)", l, pi[l]));
        logits[static_cast<Eigen::Index>(l)] = std::log(pi[l]) - std::log1p(-pi[l]);
    }
    return EdgeProbabilityVector(std::move(logits));
}

double EdgeProbabilityVector::probability(std::size_t l) const { return logistic(logits_[l]); }
double EdgeProbabilityVector::complement(std::size_t l) const { return logistic(-logits_[l]); }
double EdgeProbabilityVector::log_probability(std::size_t l) const { return log_logistic(logits_[l]); }
double EdgeProbabilityVector::log_complement(std::size_t l) const { return log_logistic(-logits_[l]); }

Eigen::VectorXd EdgeProbabilityVector::probabilities() const {
    return logits_.unaryExpr([](double s) { return logistic(s); });
}

Eigen::VectorXd component_similarity(const Eigen::VectorXd& Z, const ComponentFactors& f,
                                     const EdgeIndexMap& map) {
    if (static_cast<std::size_t>(Z.size()) != map.edges())
        throw std::invalid_argument(fmt::format("Z has length {}, expected {}", Z.size(), map.edges()));
    if (static_cast<std::size_t>(f.X.rows()) != map.nodes() || f.X.cols() != f.lambda.size())
        throw std::invalid_argument(fmt::format("factors X {}x{} / lambda {} do not match V = {}",
                                                f.X.rows(), f.X.cols(), f.lambda.size(), map.nodes()));
    const Eigen::MatrixXd W = f.X * f.lambda.asDiagonal() * f.X.transpose();
    Eigen::VectorXd S(Z.size());
    for (std::size_t l = 0; l < map.edges(); ++l) {
        const auto [v, u] = map.pair(l);
        S[static_cast<Eigen::Index>(l)] = Z[static_cast<Eigen::Index>(l)] + W(v, u);
    }
    return S;
}

EdgeProbabilityVector logistic_map(const Eigen::VectorXd& S) {
    return EdgeProbabilityVector::from_logits(S);
}

double component_log_pmf(std::span<const std::uint8_t> a, const EdgeProbabilityVector& pi) {
    if (a.size() != pi.size())
        throw std::invalid_argument(
            fmt::format("network has {} edges but probability vector has {}", a.size(), pi.size()));
    double total = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        if (a[l] > 1)
            throw std::invalid_argument(fmt::format("edge {} has non-binary value {}", l, int(a[l])));
        total += a[l] ? pi.log_probability(l) : pi.log_complement(l);
    }
    return total;
}

double canonical_sum(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0, comp = 0.0;
    for (double v : values) {
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double canonical_log_sum_exp(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    if (values.empty() || !std::isfinite(values.back()))
        return values.empty() ? -std::numeric_limits<double>::infinity() : values.back();
    const double m = values.back();
    double s = 0.0;
    for (double v : values)
        s += std::exp(v - m);
    return m + std::log(s);
}

MixtureEvaluator::MixtureEvaluator(const MixtureParameters& params)
    : params_(&params), map_(params.nodes()) {
    pi_.reserve(params.mixture_size());
    for (const auto& c : params.components)
        pi_.push_back(logistic_map(component_similarity(params.Z, c, map_)));
}

double MixtureEvaluator::component_log_pmf(std::span<const std::uint8_t> a, std::size_t h) const {
    return netmix::component_log_pmf(a, pi_.at(h));
}

double MixtureEvaluator::mixture_log_pmf(std::span<const std::uint8_t> a,
                                         const Eigen::VectorXd& weights) const {
    if (static_cast<std::size_t>(weights.size()) != pi_.size())
        throw std::invalid_argument("mixture weights do not match component count");
    std::vector<double> terms;
    terms.reserve(pi_.size());
    for (std::size_t h = 0; h < pi_.size(); ++h) {
        const double w = weights[static_cast<Eigen::Index>(h)];
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument(fmt::format("invalid mixture weight {} for component {}", w, h));
        if (w > 0.0)
            terms.push_back(std::log(w) + component_log_pmf(a, h));
    }
    return canonical_log_sum_exp(std::move(terms));
}

double MixtureEvaluator::conditional_log_pmf(std::span<const std::uint8_t> a, int y) const {
    if (y != 0 && y != 1)
        throw std::invalid_argument(fmt::format("group label {} must be 0 or 1", y));
    return mixture_log_pmf(a, params_->nu(y));
}

double MixtureEvaluator::marginal_log_pmf(std::span<const std::uint8_t> a) const {
    const Eigen::VectorXd w = params_->p_group(0) * params_->nu0 + params_->p_group(1) * params_->nu1;
    return mixture_log_pmf(a, w);
}

double MixtureEvaluator::joint_log_pmf(int y, std::span<const std::uint8_t> a) const {
    const double py = params_->p_group(y);
    const double log_py = py > 0.0 ? std::log(py) : -std::numeric_limits<double>::infinity();
    return log_py + conditional_log_pmf(a, y);
}

double MixtureEvaluator::edge_probability(std::size_t l, int y) const {
    const auto& nu = params_->nu(y);
    std::vector<double> terms(pi_.size());
    for (std::size_t h = 0; h < pi_.size(); ++h)
        terms[h] = nu[static_cast<Eigen::Index>(h)] * pi_[h].probability(l);
    return canonical_sum(std::move(terms));
}

double MixtureEvaluator::edge_complement(std::size_t l, int y) const {
    const auto& nu = params_->nu(y);
    std::vector<double> terms(pi_.size());
    for (std::size_t h = 0; h < pi_.size(); ++h)
        terms[h] = nu[static_cast<Eigen::Index>(h)] * pi_[h].complement(l);
    return canonical_sum(std::move(terms));
}

double conditional_log_pmf(std::span<const std::uint8_t> a, const MixtureParameters& params, int y) {
    params.validate();
    return MixtureEvaluator(params).conditional_log_pmf(a, y);
}

double marginal_log_pmf(std::span<const std::uint8_t> a, const MixtureParameters& params) {
    params.validate();
    return MixtureEvaluator(params).marginal_log_pmf(a);
}

double joint_log_pmf(int y, std::span<const std::uint8_t> a, const MixtureParameters& params) {
    return MixtureEvaluator(params).joint_log_pmf(y, a);
}

EdgeVector sample_network(const EdgeProbabilityVector& pi, Rng& rng) {
    EdgeVector a(pi.size());
    for (std::size_t l = 0; l < a.size(); ++l)
        a[l] = uniform_open(rng) < pi.probability(l) ? 1 : 0;
    return a;
}

std::vector<NetworkObservation> sample_cohort(const MixtureParameters& params, std::size_t n0,
                                              std::size_t n1, Rng& rng,
                                              std::vector<int>& components_out) {
    params.validate();
    const MixtureEvaluator eval(params);
    const std::uint64_t key = rng();
    std::vector<NetworkObservation> cohort;
    cohort.reserve(n0 + n1);
    components_out.assign(n0 + n1, 0);
    std::vector<double> log_nu(params.mixture_size());
    for (std::size_t i = 0; i < n0 + n1; ++i) {
        const int y = i < n0 ? 0 : 1;
        const auto& nu = params.nu(y);
        for (std::size_t h = 0; h < log_nu.size(); ++h)
            log_nu[h] = std::log(nu[static_cast<Eigen::Index>(h)]);
        Rng sub = substream(key, i);
        const std::size_t g = categorical_log(sub, log_nu);
        components_out[i] = static_cast<int>(g);
        cohort.push_back({fmt::format("s{:04d}", i + 1), y, sample_network(eval.components()[g], sub)});
    }
    return cohort;
}

std::vector<NetworkObservation> sample_cohort(const MixtureParameters& params, std::size_t n0,
                                              std::size_t n1, Rng& rng) {
    std::vector<int> ignored;
    return sample_cohort(params, n0, n1, rng, ignored);
}

}  // namespace netmix
