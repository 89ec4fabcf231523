#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "netmix/network_model.hpp"
#include "oracle.hpp"
#include "scenarios.hpp"

using namespace netmix;
using doctest::Approx;

namespace {

MixtureParameters fixed_two_component() {
    Rng rng(11);
    auto p = testing::random_parameters(4, 2, 2, rng);
    p.nu0 = Eigen::Vector2d(0.3, 0.7);
    p.nu1 = Eigen::Vector2d(0.6, 0.4);
    p.T = 1;
    return p;
}

double enumerate_total(const std::function<double(const EdgeVector&)>& log_pmf, std::size_t L) {
    std::vector<double> terms;
    for (std::size_t k = 0; k < (std::size_t{1} << L); ++k)
        terms.push_back(std::exp(log_pmf(oracle::configuration(k, L))));
    return canonical_sum(terms);
}

}  // namespace

TEST_CASE("component similarity with zero weights is Z") {
    const EdgeIndexMap map(4);
    Rng rng(1);
    Eigen::VectorXd Z(6);
    for (auto& z : Z)
        z = std_normal(rng);
    ComponentFactors f{Eigen::MatrixXd::Random(4, 3), Eigen::VectorXd::Zero(3)};
    CHECK(component_similarity(Z, f, map) == Z);
}

TEST_CASE("a zero weight silences its coordinate") {
    const EdgeIndexMap map(5);
    ComponentFactors f{Eigen::MatrixXd::Random(5, 2), Eigen::Vector2d(1.0, 0.0)};
    const Eigen::VectorXd before = component_similarity(Eigen::VectorXd::Zero(10), f, map);
    f.X.col(1).setRandom();
    CHECK(component_similarity(Eigen::VectorXd::Zero(10), f, map) == before);
}

TEST_CASE("hand-evaluated rank-one similarity") {
    const EdgeIndexMap map(4);
    ComponentFactors f{Eigen::Vector4d(1, -1, 3, 0), Eigen::VectorXd::Constant(1, 2.0)};
    Eigen::VectorXd expected(6);
    expected << -2, 6, 0, -6, 0, 0;
    CHECK(component_similarity(Eigen::VectorXd::Zero(6), f, map) == expected);
}

TEST_CASE("similarity is invariant to a column sign flip") {
    const EdgeIndexMap map(6);
    Rng rng(3);
    ComponentFactors f{Eigen::MatrixXd::Random(6, 3), Eigen::Vector3d(1.5, 0.4, 0.1)};
    const Eigen::VectorXd Z = Eigen::VectorXd::Random(15);
    const Eigen::VectorXd before = component_similarity(Z, f, map);
    f.X.col(1) *= -1.0;
    CHECK(component_similarity(Z, f, map) == before);
}

TEST_CASE("component similarity checks dimensions") {
    const EdgeIndexMap map(4);
    ComponentFactors f{Eigen::MatrixXd::Zero(4, 2), Eigen::VectorXd::Zero(3)};
    CHECK_THROWS_AS(component_similarity(Eigen::VectorXd::Zero(6), f, map), std::invalid_argument);
    f.lambda = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(component_similarity(Eigen::VectorXd::Zero(5), f, map), std::invalid_argument);
}

TEST_CASE("logistic map values") {
    Eigen::VectorXd S(3);
    S << 0.0, 50.0, std::log(3.0);
    const auto pi = logistic_map(S);
    CHECK(pi.probability(0) == 0.5);
    CHECK(std::abs(1.0 - pi.probability(1)) < 1e-12);
    CHECK(pi.probability(2) == Approx(0.75).epsilon(1e-15));
}

TEST_CASE("logistic map stays finite and monotone at extreme similarities") {
    Eigen::VectorXd S = Eigen::VectorXd::LinSpaced(2001, -700.0, 700.0);
    const auto pi = logistic_map(S);
    for (std::size_t l = 0; l < pi.size(); ++l) {
        REQUIRE(std::isfinite(pi.log_probability(l)));
        REQUIRE(std::isfinite(pi.log_complement(l)));
        if (l > 0) {
            REQUIRE(pi.logits()[static_cast<Eigen::Index>(l)] > pi.logits()[static_cast<Eigen::Index>(l - 1)]);
            REQUIRE(pi.log_probability(l) >= pi.log_probability(l - 1));
        }
    }
    Eigen::VectorXd fine = Eigen::VectorXd::LinSpaced(101, -5.0, 5.0);
    const auto q = logistic_map(fine);
    for (std::size_t l = 1; l < q.size(); ++l)
        CHECK(q.probability(l) > q.probability(l - 1));
    CHECK_THROWS_AS(logistic_map(Eigen::VectorXd::Constant(2, std::nan(""))), std::invalid_argument);
}

TEST_CASE("component log pmf values") {
    const std::vector<double> half(6, 0.5);
    const auto u = EdgeProbabilityVector::from_probabilities(half);
    CHECK(component_log_pmf(EdgeVector{1, 0, 1, 1, 0, 0}, u) == Approx(std::log(std::pow(2.0, -6))).epsilon(1e-14));
    const std::vector<double> p = {0.9, 0.2};
    const auto pi = EdgeProbabilityVector::from_probabilities(p);
    CHECK(component_log_pmf(EdgeVector{1, 0}, pi) == Approx(std::log(0.72)).epsilon(1e-14));
    CHECK_THROWS_AS(component_log_pmf(EdgeVector{1}, pi), std::invalid_argument);
    CHECK_THROWS_AS(EdgeProbabilityVector::from_probabilities(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("pmfs normalize over all 64 configurations at V = 4") {
    const auto p = fixed_two_component();
    const MixtureEvaluator eval(p);
    CHECK(enumerate_total([&](const EdgeVector& a) { return eval.component_log_pmf(a, 0); }, 6) ==
          Approx(1.0).epsilon(1e-12));
    CHECK(enumerate_total([&](const EdgeVector& a) { return eval.conditional_log_pmf(a, 0); }, 6) ==
          Approx(1.0).epsilon(1e-12));
    CHECK(enumerate_total([&](const EdgeVector& a) { return eval.marginal_log_pmf(a); }, 6) ==
          Approx(1.0).epsilon(1e-12));
    const double joint = enumerate_total([&](const EdgeVector& a) { return eval.joint_log_pmf(0, a); }, 6) +
                         enumerate_total([&](const EdgeVector& a) { return eval.joint_log_pmf(1, a); }, 6);
    CHECK(joint == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate mixtures reduce to one component") {
    Rng rng(5);
    auto p = testing::random_parameters(4, 1, 2, rng);
    const MixtureEvaluator one(p);
    const EdgeVector a{1, 0, 0, 1, 1, 0};
    CHECK(one.conditional_log_pmf(a, 0) == one.component_log_pmf(a, 0));
    CHECK(one.conditional_log_pmf(a, 1) == one.component_log_pmf(a, 0));

    auto q = fixed_two_component();
    q.nu1 = Eigen::Vector2d(1.0, 0.0);
    const MixtureEvaluator two(q);
    CHECK(two.conditional_log_pmf(a, 1) == two.component_log_pmf(a, 0));
}

TEST_CASE("joint pmf with identical conditionals and pY1 = 0.5 is symmetric in y") {
    auto p = fixed_two_component();
    p.nu1 = p.nu0;
    p.T = 0;
    p.pY1 = 0.5;
    const MixtureEvaluator eval(p);
    for (std::size_t k = 0; k < 64; ++k) {
        const auto a = oracle::configuration(k, 6);
        CHECK(eval.joint_log_pmf(0, a) == eval.joint_log_pmf(1, a));
    }
}

TEST_CASE("joint pmf of an impossible group is -inf") {
    auto p = fixed_two_component();
    p.pY1 = 1.0;
    CHECK_THROWS(p.validate());
    const MixtureEvaluator eval(p);
    const double v = eval.joint_log_pmf(0, EdgeVector(6, 0));
    CHECK(std::isinf(v));
    CHECK(v < 0);
}

TEST_CASE("conditional pmf is invariant to relabeling components") {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        auto p = testing::random_parameters(5, 4, 2, rng);
        std::vector<std::size_t> perm(4);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        MixtureParameters q = p;
        for (std::size_t h = 0; h < 4; ++h) {
            q.components[h] = p.components[perm[h]];
            q.nu0[static_cast<Eigen::Index>(h)] = p.nu0[static_cast<Eigen::Index>(perm[h])];
            q.nu1[static_cast<Eigen::Index>(h)] = p.nu1[static_cast<Eigen::Index>(perm[h])];
        }
        const MixtureEvaluator ep(p), eq(q);
        const auto a = oracle::configuration(static_cast<std::size_t>(rng() % 1024), 10);
        CHECK(ep.conditional_log_pmf(a, 0) == eq.conditional_log_pmf(a, 0));
        CHECK(ep.conditional_log_pmf(a, 1) == eq.conditional_log_pmf(a, 1));
        CHECK(ep.marginal_log_pmf(a) == eq.marginal_log_pmf(a));
        CHECK(ep.edge_probability(3, 1) == eq.edge_probability(3, 1));
    }
}

TEST_CASE("parameter validation") {
    auto p = fixed_two_component();
    CHECK_NOTHROW(p.validate());
    auto q = p;
    q.nu0 = Eigen::Vector2d(0.5, 0.6);
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.T = 0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.pY1 = 0.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.components[1].lambda[0] = -1.0;
    CHECK_THROWS_AS(q.validate(), std::invalid_argument);
    q = p;
    q.nu0 = Eigen::Vector2d(0.3 + 5e-11, 0.7);
    CHECK_NOTHROW(q.validate());
}

TEST_CASE("saturated and empty probabilities give complete and empty networks") {
    Rng rng(2);
    const auto full = EdgeProbabilityVector::from_probabilities(std::vector<double>(190, 1.0 - 1e-16));
    const auto none = EdgeProbabilityVector::from_logits(Eigen::VectorXd::Constant(190, -60.0));
    CHECK(sample_network(full, rng) == EdgeVector(190, 1));
    CHECK(sample_network(none, rng) == EdgeVector(190, 0));
}

TEST_CASE("edge frequency matches its probability") {
    Rng rng(4);
    const auto pi = EdgeProbabilityVector::from_probabilities(std::vector<double>{0.7});
    int hits = 0;
    for (int k = 0; k < 10000; ++k)
        hits += sample_network(pi, rng)[0];
    CHECK(std::abs(hits / 10000.0 - 0.7) < 0.02);
}

TEST_CASE("cohorts have the requested group sizes and are reproducible") {
    Rng a(9), b(9);
    auto p = fixed_two_component();
    const auto c1 = sample_cohort(p, 7, 5, a);
    const auto c2 = sample_cohort(p, 7, 5, b);
    REQUIRE(c1.size() == 12);
    CHECK(std::count_if(c1.begin(), c1.end(), [](const auto& s) { return s.label == 0; }) == 7);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(c1[i].edges == c2[i].edges);
        CHECK(c1[i].subject_id == c2[i].subject_id);
        CHECK(c1[i].label == c2[i].label);
    }
}

TEST_CASE("single-component cohorts share one distribution") {
    Rng rng(12);
    auto p = testing::random_parameters(4, 1, 1, rng);
    std::vector<int> comps;
    sample_cohort(p, 4, 4, rng, comps);
    CHECK(std::all_of(comps.begin(), comps.end(), [](int g) { return g == 0; }));
}

TEST_CASE("dense versus sparse component separates group edge counts") {
    const std::size_t L = 190;
    const std::vector<Eigen::VectorXd> pi = {Eigen::VectorXd::Constant(L, 0.7), Eigen::VectorXd::Constant(L, 0.3)};
    auto p = testing::parameters_from_probabilities(pi, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 0.5);
    Rng rng(21);
    const auto cohort = sample_cohort(p, 50, 50, rng);
    double m[2] = {0, 0};
    for (const auto& s : cohort)
        m[s.label] += std::accumulate(s.edges.begin(), s.edges.end(), 0.0) / 50.0;
    // Each mean has standard error sqrt(L * 0.21 / 50) ~ 0.9.
    CHECK(m[0] - m[1] > 5 * std::sqrt(2 * L * 0.21 / 50));
}

TEST_CASE("canonical sums do not depend on order") {
    std::vector<double> v = {1e-20, 3.0, -2.5, 1e16, -1e16, 0.1};
    const double s = canonical_sum(v);
    std::reverse(v.begin(), v.end());
    CHECK(canonical_sum(v) == s);
    std::vector<double> w = {-1000.0, -1001.0, -999.5};
    const double lse = canonical_log_sum_exp(w);
    std::swap(w[0], w[2]);
    CHECK(canonical_log_sum_exp(w) == lse);
    CHECK(lse == Approx(-999.5 + std::log(1 + std::exp(-0.5) + std::exp(-1.5))));
    CHECK(std::isinf(canonical_log_sum_exp({})));
}
