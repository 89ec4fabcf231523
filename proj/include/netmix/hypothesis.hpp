#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netmix/network_model.hpp"
#include "netmix/random.hpp"
#include "netmix/sampler.hpp"

namespace netmix {

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr double kDefaultDecisionCutoff = 0.95;

struct TestReport {
    double pr_H1 = 0.0;
    Eigen::VectorXd rho_exceed;       // Pr(rho_l > epsilon | data)
    double epsilon = kDefaultEpsilon;
    Eigen::VectorXd edge_diff;        // posterior mean of Pr(a_l=1|y=1) - Pr(a_l=1|y=0)
    std::vector<bool> significant_edges;  // rho_exceed > decision_cutoff
    double decision_cutoff = kDefaultDecisionCutoff;
    std::size_t nodes = 0;
    std::size_t n_draws = 0;

    std::size_t significant_count() const;
};

/// Posterior fraction of kept draws with T = 1. Throws for single-group fits.
double global_test(const PosteriorDraws& draws);

/// Cramer's V between the group label and each edge under one parameter set.
Eigen::VectorXd cramers_v(const MixtureParameters& params);

/// Fraction of kept draws whose per-edge Cramer's V exceeds epsilon.
Eigen::VectorXd local_test(const PosteriorDraws& draws, double epsilon = kDefaultEpsilon);

Eigen::VectorXd edge_difference(const PosteriorDraws& draws);

TestReport make_test_report(const PosteriorDraws& draws, double epsilon = kDefaultEpsilon,
                            double decision_cutoff = kDefaultDecisionCutoff);

/// Number of significant edges incident to each node.
std::vector<int> test_degree(const TestReport& report, const EdgeIndexMap& map);

/// Posterior mean of Pr(y = 1 | network) under the group-conditional mixtures.
double classify(std::span<const std::uint8_t> a, const PosteriorDraws& draws);

/// classify() for many networks, sharing the per-draw component evaluation.
std::vector<double> classify_many(const std::vector<EdgeVector>& networks, const PosteriorDraws& draws);

/// Train/test index split. For in-sample evaluation both lists hold every subject.
struct HoldoutSpec {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;

    static HoldoutSpec in_sample(std::size_t n);
    /// Random split stratified by group; test_fraction of subjects are held out.
    static HoldoutSpec random_split(const std::vector<NetworkObservation>& data, double test_fraction,
                                    std::uint64_t seed);
    std::vector<NetworkObservation> training_data(const std::vector<NetworkObservation>& data) const;
};

struct ClassificationResult {
    std::vector<std::size_t> subjects;  // indices into the data
    std::vector<int> labels;
    std::vector<double> probabilities;
    std::vector<int> predicted;  // probability >= 0.5
    double auc = 0.0;
    double accuracy = 0.0;
};

/// Evaluates the classifier on holdout.test. The draws must come from a fit
/// on exactly holdout.train (checked through the data checksum).
ClassificationResult evaluate_classifier(const std::vector<NetworkObservation>& data,
                                         const PosteriorDraws& draws, const HoldoutSpec& holdout);

/// Mann-Whitney AUC with tied scores given average ranks.
double rank_auc(std::span<const double> scores, std::span<const int> labels);

/// Two-sided Fisher exact p-value for the table [[a, b], [c, d]].
double fisher_exact_two_sided(std::size_t a, std::size_t b, std::size_t c, std::size_t d);

/// Benjamini-Hochberg step-up rejections at the given FDR level.
std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double level);

struct EdgeScreen {
    std::vector<double> p_values;
    std::vector<bool> rejected;
};

/// Per-edge Fisher exact tests of group x edge presence with BH control.
EdgeScreen fisher_baseline(const std::vector<NetworkObservation>& data, double fdr_level);

}  // namespace netmix
