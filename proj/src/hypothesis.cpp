#include "netmix/hypothesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/hypergeometric.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

namespace netmix {

namespace {

void require_two_groups(const PosteriorDraws& draws) {
    if (!draws.meta.two_group())
        throw std::invalid_argument("group tests need a fit with both groups present");
    if (draws.draws.empty())
        throw std::invalid_argument("posterior has no kept draws");
}

Eigen::VectorXd cramers_v(const MixtureEvaluator& eval) {
    const auto& p = eval.params();
    const std::size_t L = p.edges();
    const double w[2] = {p.p_group(0), p.p_group(1)};
    Eigen::VectorXd rho(static_cast<Eigen::Index>(L));
    for (std::size_t l = 0; l < L; ++l) {
        const double cond1[2] = {eval.edge_probability(l, 0), eval.edge_probability(l, 1)};
        const double cond0[2] = {eval.edge_complement(l, 0), eval.edge_complement(l, 1)};
        const double marg1 = w[0] * cond1[0] + w[1] * cond1[1];
        const double marg0 = w[0] * cond0[0] + w[1] * cond0[1];
        double rho2 = 0.0;
        if (marg1 > 0.0 && marg0 > 0.0) {
            for (int y = 0; y < 2; ++y) {
                const double d1 = cond1[y] - marg1;
                const double d0 = cond0[y] - marg0;
                rho2 += w[y] * (d1 * d1 / marg1 + d0 * d0 / marg0);
            }
        } else if (std::abs(cond1[0] - cond1[1]) > 1e-12) {
            throw std::domain_error(fmt::format("edge {} has a degenerate marginal but differing conditionals", l));
        }
        rho[static_cast<Eigen::Index>(l)] = std::min(1.0, std::sqrt(rho2));
    }
    return rho;
}

double classify_with(const MixtureEvaluator& eval, std::span<const std::uint8_t> a) {
    const auto& p = eval.params();
    const double lp1 = std::log(p.pY1) + eval.conditional_log_pmf(a, 1);
    const double lp0 = std::log1p(-p.pY1) + eval.conditional_log_pmf(a, 0);
    if (!std::isfinite(lp1) && !std::isfinite(lp0))
        return p.pY1;
    return logistic(lp1 - lp0);
}

}  // namespace

std::size_t TestReport::significant_count() const {
    return static_cast<std::size_t>(std::count(significant_edges.begin(), significant_edges.end(), true));
}

double global_test(const PosteriorDraws& draws) {
    require_two_groups(draws);
    std::size_t ones = 0;
    for (const auto& d : draws.draws)
        ones += d.params.T == 1 ? 1 : 0;
    return static_cast<double>(ones) / static_cast<double>(draws.draws.size());
}

Eigen::VectorXd cramers_v(const MixtureParameters& params) {
    params.validate();
    return cramers_v(MixtureEvaluator(params));
}

Eigen::VectorXd local_test(const PosteriorDraws& draws, double epsilon) {
    return make_test_report(draws, epsilon).rho_exceed;
}

Eigen::VectorXd edge_difference(const PosteriorDraws& draws) {
    return make_test_report(draws).edge_diff;
}

TestReport make_test_report(const PosteriorDraws& draws, double epsilon, double decision_cutoff) {
    require_two_groups(draws);
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(fmt::format("epsilon = {} must lie in (0, 1)", epsilon));
    if (!(decision_cutoff >= 0.0 && decision_cutoff <= 1.0))
        throw std::invalid_argument(fmt::format("decision cutoff = {} must lie in [0, 1]", decision_cutoff));
    const auto L = static_cast<Eigen::Index>(EdgeIndexMap::edge_count(draws.meta.nodes));

    TestReport r;
    r.epsilon = epsilon;
    r.decision_cutoff = decision_cutoff;
    r.nodes = draws.meta.nodes;
    r.n_draws = draws.draws.size();
    r.pr_H1 = global_test(draws);
    r.rho_exceed = Eigen::VectorXd::Zero(L);
    r.edge_diff = Eigen::VectorXd::Zero(L);
    for (const auto& d : draws.draws) {
        const MixtureEvaluator eval(d.params);
        const Eigen::VectorXd rho = cramers_v(eval);
        for (Eigen::Index l = 0; l < L; ++l) {
            if (rho[l] > epsilon)
                r.rho_exceed[l] += 1.0;
            const auto ul = static_cast<std::size_t>(l);
            r.edge_diff[l] += eval.edge_probability(ul, 1) - eval.edge_probability(ul, 0);
        }
    }
    const double n = static_cast<double>(draws.draws.size());
    r.rho_exceed /= n;
    r.edge_diff /= n;
    r.significant_edges.resize(static_cast<std::size_t>(L));
    for (Eigen::Index l = 0; l < L; ++l)
        r.significant_edges[static_cast<std::size_t>(l)] = r.rho_exceed[l] > decision_cutoff;
    return r;
}

std::vector<int> test_degree(const TestReport& report, const EdgeIndexMap& map) {
    if (report.significant_edges.size() != map.edges())
        throw std::invalid_argument("report and edge map disagree on the number of edges");
    std::vector<int> degree(map.nodes(), 0);
    for (std::size_t l = 0; l < map.edges(); ++l) {
        if (!report.significant_edges[l])
            continue;
        const auto [v, u] = map.pair(l);
        ++degree[v];
        ++degree[u];
    }
    return degree;
}

std::vector<double> classify_many(const std::vector<EdgeVector>& networks, const PosteriorDraws& draws) {
    if (draws.draws.empty())
        throw std::invalid_argument("posterior has no kept draws");
    const std::size_t L = EdgeIndexMap::edge_count(draws.meta.nodes);
    for (const auto& a : networks)
        if (a.size() != L)
            throw std::invalid_argument(
                fmt::format("network has {} edges, the fit expects {} (V = {})", a.size(), L, draws.meta.nodes));
    std::vector<double> out(networks.size(), 0.0);
    for (const auto& d : draws.draws) {
        const MixtureEvaluator eval(d.params);
        for (std::size_t i = 0; i < networks.size(); ++i)
            out[i] += classify_with(eval, networks[i]);
    }
    for (auto& p : out)
        p /= static_cast<double>(draws.draws.size());
    return out;
}

double classify(std::span<const std::uint8_t> a, const PosteriorDraws& draws) {
    return classify_many({EdgeVector(a.begin(), a.end())}, draws).front();
}

HoldoutSpec HoldoutSpec::in_sample(std::size_t n) {
    HoldoutSpec s;
    s.train.resize(n);
    std::iota(s.train.begin(), s.train.end(), 0);
    s.test = s.train;
    return s;
}

HoldoutSpec HoldoutSpec::random_split(const std::vector<NetworkObservation>& data, double test_fraction,
                                      std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument(fmt::format("test fraction {} must lie in (0, 1)", test_fraction));
    std::vector<std::size_t> groups[2];
    for (std::size_t i = 0; i < data.size(); ++i)
        groups[data[i].label == 1 ? 1 : 0].push_back(i);
    const auto n = static_cast<double>(data.size());
    const auto n_test = data.size() - static_cast<std::size_t>(std::llround((1.0 - test_fraction) * n));
    std::size_t take[2];
    take[0] = std::min(groups[0].size(),
                       static_cast<std::size_t>(std::llround(double(n_test) * double(groups[0].size()) / n)));
    take[1] = std::min(groups[1].size(), n_test - take[0]);

    Rng rng(seed);
    HoldoutSpec s;
    for (int y = 0; y < 2; ++y) {
        auto& g = groups[y];
        for (std::size_t k = g.size(); k > 1; --k) {
            boost::random::uniform_int_distribution<std::size_t> pick(0, k - 1);
            std::swap(g[k - 1], g[pick(rng)]);
        }
        s.test.insert(s.test.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(take[y]));
        s.train.insert(s.train.end(), g.begin() + static_cast<std::ptrdiff_t>(take[y]), g.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

std::vector<NetworkObservation> HoldoutSpec::training_data(const std::vector<NetworkObservation>& data) const {
    std::vector<NetworkObservation> out;
    out.reserve(train.size());
    for (auto i : train)
        out.push_back(data.at(i));
    return out;
}

ClassificationResult evaluate_classifier(const std::vector<NetworkObservation>& data,
                                         const PosteriorDraws& draws, const HoldoutSpec& holdout) {
    const auto train = holdout.training_data(data);
    bool has[2] = {false, false};
    for (const auto& s : train)
        has[s.label == 1 ? 1 : 0] = true;
    for (auto i : holdout.test)
        if (!has[data.at(i).label == 1 ? 1 : 0])
            throw std::invalid_argument(
                fmt::format("test subject {} belongs to group {}, which is absent from training",
                            data[i].subject_id, data[i].label));
    if (data_checksum(train) != draws.meta.data_checksum)
        throw std::invalid_argument("posterior draws were not fitted on the training subjects");

    ClassificationResult r;
    r.subjects = holdout.test;
    std::vector<EdgeVector> networks;
    for (auto i : holdout.test) {
        networks.push_back(data[i].edges);
        r.labels.push_back(data[i].label);
    }
    r.probabilities = classify_many(networks, draws);
    std::size_t correct = 0;
    for (std::size_t k = 0; k < r.probabilities.size(); ++k) {
        r.predicted.push_back(r.probabilities[k] >= 0.5 ? 1 : 0);
        correct += r.predicted[k] == r.labels[k] ? 1 : 0;
    }
    r.accuracy = r.labels.empty() ? 0.0 : double(correct) / double(r.labels.size());
    r.auc = rank_auc(r.probabilities, r.labels);
    return r;
}

double rank_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels differ in length");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return scores[i] < scores[j]; });
    std::vector<double> rank(scores.size());
    for (std::size_t k = 0; k < order.size();) {
        std::size_t e = k;
        while (e + 1 < order.size() && scores[order[e + 1]] == scores[order[k]])
            ++e;
        const double avg = 0.5 * double(k + e) + 1.0;
        for (std::size_t j = k; j <= e; ++j)
            rank[order[j]] = avg;
        k = e + 1;
    }
    double n1 = 0.0, n0 = 0.0, rank_sum = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == 1) {
            n1 += 1.0;
            rank_sum += rank[i];
        } else {
            n0 += 1.0;
        }
    }
    if (n1 == 0.0 || n0 == 0.0)
        throw std::invalid_argument("AUC needs both groups among the evaluated subjects");
    return (rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
}

double fisher_exact_two_sided(std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    const std::size_t row1 = a + b, col1 = a + c, total = a + b + c + d;
    if (total == 0)
        return 1.0;
    const boost::math::hypergeometric_distribution<double> hyper(col1, row1, total);
    const double observed = boost::math::pdf(hyper, a);
    const std::size_t lo = col1 > total - row1 ? col1 - (total - row1) : 0;
    const std::size_t hi = std::min(row1, col1);
    double p = 0.0;
    for (std::size_t x = lo; x <= hi; ++x) {
        const double px = boost::math::pdf(hyper, x);
        if (px <= observed * (1.0 + 1e-7))
            p += px;
    }
    return std::min(1.0, p);
}

std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double level) {
    const std::size_t m = p_values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return p_values[i] < p_values[j]; });
    std::size_t cut = 0;
    for (std::size_t k = 0; k < m; ++k)
        if (p_values[order[k]] <= double(k + 1) / double(m) * level)
            cut = k + 1;
    std::vector<bool> reject(m, false);
    for (std::size_t k = 0; k < cut; ++k)
        reject[order[k]] = true;
    return reject;
}

EdgeScreen fisher_baseline(const std::vector<NetworkObservation>& data, double fdr_level) {
    if (data.empty())
        throw std::invalid_argument("no subjects in data");
    const std::size_t L = data.front().edges.size();
    std::size_t n[2] = {0, 0};
    std::vector<std::size_t> present[2] = {std::vector<std::size_t>(L, 0), std::vector<std::size_t>(L, 0)};
    for (const auto& s : data) {
        if (s.edges.size() != L)
            throw std::invalid_argument(fmt::format("subject {} has {} edges, expected {}", s.subject_id, s.edges.size(), L));
        const int y = s.label == 1 ? 1 : 0;
        ++n[y];
        for (std::size_t l = 0; l < L; ++l)
            present[y][l] += s.edges[l];
    }
    if (n[0] == 0 || n[1] == 0)
        throw std::invalid_argument("Fisher baseline needs both groups");
    EdgeScreen out;
    out.p_values.resize(L);
    for (std::size_t l = 0; l < L; ++l)
        out.p_values[l] = fisher_exact_two_sided(present[0][l], n[0] - present[0][l], present[1][l],
                                                 n[1] - present[1][l]);
    out.rejected = benjamini_hochberg(out.p_values, fdr_level);
    return out;
}

}  // namespace netmix
