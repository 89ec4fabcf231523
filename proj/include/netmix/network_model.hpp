#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netmix/edge_index.hpp"
#include "netmix/random.hpp"

namespace netmix {

struct NetworkObservation {
    std::string subject_id;
    int label = 0;  // 0 = control, 1 = case
    EdgeVector edges;
};

/// Latent coordinates X (V x R, unscaled) and nonnegative weights lambda
/// (length R) of one mixture component.
struct ComponentFactors {
    Eigen::MatrixXd X;
    Eigen::VectorXd lambda;
};

/**
 * Full model state: the shared similarity Z, H component factorizations,
 * group-specific mixing weights and the group prevalence.
 *
 * Invariants (checked by validate()):
 *  - nu0, nu1 are probability vectors of length H (sum within 1e-10);
 *  - T == 0 implies nu0 == nu1 entrywise;
 *  - 0 < pY1 < 1.
 */
struct MixtureParameters {
    Eigen::VectorXd Z;
    std::vector<ComponentFactors> components;
    Eigen::VectorXd nu0;
    Eigen::VectorXd nu1;
    double pY1 = 0.5;
    int T = 0;

    std::size_t nodes() const;
    std::size_t rank() const;
    std::size_t mixture_size() const { return components.size(); }
    std::size_t edges() const { return static_cast<std::size_t>(Z.size()); }

    const Eigen::VectorXd& nu(int y) const { return y == 0 ? nu0 : nu1; }
    double p_group(int y) const { return y == 0 ? 1.0 - pY1 : pY1; }

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

/**
 * Edge probabilities pi_l = 1 / (1 + exp(-S_l)), kept in logit form so that
 * log pi and log(1 - pi) stay accurate when pi rounds to 0 or 1.
 */
class EdgeProbabilityVector {
public:
    EdgeProbabilityVector() = default;
    static EdgeProbabilityVector from_logits(Eigen::VectorXd logits);
    /// Every entry must lie strictly inside (0, 1).
    static EdgeProbabilityVector from_probabilities(std::span<const double> pi);

    std::size_t size() const { return static_cast<std::size_t>(logits_.size()); }
    double probability(std::size_t l) const;
    double complement(std::size_t l) const;  // 1 - pi_l, without cancellation
    double log_probability(std::size_t l) const;
    double log_complement(std::size_t l) const;
    const Eigen::VectorXd& logits() const { return logits_; }
    Eigen::VectorXd probabilities() const;

private:
    explicit EdgeProbabilityVector(Eigen::VectorXd logits) : logits_(std::move(logits)) {}
    Eigen::VectorXd logits_;
};

double logistic(double s);
/// log(1 / (1 + exp(-s))) evaluated without overflow.
double log_logistic(double s);

/// S_l = Z_l + sum_r lambda_r X_vr X_ur for (v, u) = map.pair(l).
Eigen::VectorXd component_similarity(const Eigen::VectorXd& Z, const ComponentFactors& f,
                                     const EdgeIndexMap& map);

EdgeProbabilityVector logistic_map(const Eigen::VectorXd& S);

double component_log_pmf(std::span<const std::uint8_t> a, const EdgeProbabilityVector& pi);

/**
 * Caches the component edge-probability vectors of one parameter set and
 * evaluates the mixture pmfs in log space.
 */
class MixtureEvaluator {
public:
    explicit MixtureEvaluator(const MixtureParameters& params);

    const MixtureParameters& params() const { return *params_; }
    const EdgeIndexMap& map() const { return map_; }
    const std::vector<EdgeProbabilityVector>& components() const { return pi_; }

    double component_log_pmf(std::span<const std::uint8_t> a, std::size_t h) const;
    /// log sum_h nu_hy prod_l Bern(a_l; pi_l^(h))
    double conditional_log_pmf(std::span<const std::uint8_t> a, int y) const;
    /// Same mixture with weights nu_h = sum_y p_Y(y) nu_hy.
    double marginal_log_pmf(std::span<const std::uint8_t> a) const;
    double joint_log_pmf(int y, std::span<const std::uint8_t> a) const;

    /// Pr(edge l present | y) = sum_h nu_hy pi_l^(h), and its complement.
    double edge_probability(std::size_t l, int y) const;
    double edge_complement(std::size_t l, int y) const;

private:
    double mixture_log_pmf(std::span<const std::uint8_t> a, const Eigen::VectorXd& weights) const;

    const MixtureParameters* params_;
    EdgeIndexMap map_;
    std::vector<EdgeProbabilityVector> pi_;
};

double conditional_log_pmf(std::span<const std::uint8_t> a, const MixtureParameters& params, int y);
double marginal_log_pmf(std::span<const std::uint8_t> a, const MixtureParameters& params);
double joint_log_pmf(int y, std::span<const std::uint8_t> a, const MixtureParameters& params);

/// Independent Bernoulli(pi_l) edges.
EdgeVector sample_network(const EdgeProbabilityVector& pi, Rng& rng);

/// n0 control subjects followed by n1 cases; each subject draws its
/// component from nu_y and then its edges. Subject i uses its own substream.
std::vector<NetworkObservation> sample_cohort(const MixtureParameters& params, std::size_t n0,
                                              std::size_t n1, Rng& rng);

/// Same as sample_cohort but also returns the component of every subject.
std::vector<NetworkObservation> sample_cohort(const MixtureParameters& params, std::size_t n0,
                                              std::size_t n1, Rng& rng,
                                              std::vector<int>& components_out);

/// Sum of values in a canonical (sorted) order, so the result does not
/// depend on the order in which mixture components are stored.
double canonical_sum(std::vector<double> values);
double canonical_log_sum_exp(std::vector<double> values);

}  // namespace netmix
