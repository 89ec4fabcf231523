#include <doctest.h>

#include <cmath>
#include <numbers>

#include "netmix/priors.hpp"

using namespace netmix;
using doctest::Approx;

namespace {

HyperParameters hyper_for(std::size_t V, std::size_t H, std::size_t R) {
    HyperParameters h;
    h.V = V;
    h.H = H;
    h.R = R;
    return h;
}

}  // namespace

TEST_CASE("defaults") {
    const HyperParameters h;
    CHECK(h.H == 15);
    CHECK(h.R == 10);
    CHECK(h.z_mean == 0.0);
    CHECK(h.z_var == 10.0);
    CHECK(h.mig_a1 == 2.5);
    CHECK(h.mig_a2 == 3.5);
    CHECK(h.concentration() == Approx(1.0 / 15.0));
    CHECK(h.prior_T1 == 0.5);
    CHECK(h.a0 == 1.0);
    CHECK(h.a1 == 1.0);
}

TEST_CASE("invalid hyperparameters are rejected") {
    auto h = hyper_for(4, 2, 2);
    h.z_var = 0.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h = hyper_for(4, 2, 2);
    h.dirichlet_conc = -1.0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h = hyper_for(4, 2, 2);
    h.prior_T1 = 1.5;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h = hyper_for(4, 0, 2);
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
    h = hyper_for(1, 2, 2);
    Rng rng(1);
    CHECK_THROWS_AS(sample_prior(h, rng), std::invalid_argument);
}

TEST_CASE("prior_T1 = 0 fixes the null") {
    auto h = hyper_for(4, 3, 2);
    h.prior_T1 = 0.0;
    Rng rng(2);
    for (int k = 0; k < 500; ++k) {
        const auto d = sample_prior(h, rng);
        REQUIRE(d.params.T == 0);
        REQUIRE(d.params.nu0 == d.params.nu1);
    }
}

TEST_CASE("prior_T1 = 1 fixes the alternative") {
    auto h = hyper_for(4, 3, 2);
    h.prior_T1 = 1.0;
    Rng rng(3);
    for (int k = 0; k < 200; ++k)
        REQUIRE(sample_prior(h, rng).params.T == 1);
}

TEST_CASE("large mig_a2 makes weights decay fast") {
    auto h = hyper_for(3, 1, 3);
    h.mig_a2 = 20.0;
    Rng rng(4);
    double ratio = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const Eigen::VectorXd l = sample_prior(h, rng).params.components[0].lambda;
        ratio += l[2] / l[0];
    }
    // E[1 / (theta_2 theta_3)] = 1 / 19^2.
    CHECK(ratio / n < 0.01);
    CHECK(ratio / n == Approx(1.0 / 361.0).epsilon(0.05));
}

TEST_CASE("uniform Beta prior on pY1") {
    auto h = hyper_for(2, 1, 1);
    Rng rng(5);
    double s = 0.0, s2 = 0.0;
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const double p = sample_prior(h, rng).params.pY1;
        REQUIRE(p > 0.0);
        REQUIRE(p < 1.0);
        s += p;
        s2 += p * p;
    }
    CHECK(std::abs(s / n - 0.5) < 0.02);
    CHECK(s2 / n - (s / n) * (s / n) == Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("pY1 follows Beta(a1, a0)") {
    auto h = hyper_for(2, 1, 1);
    h.a1 = 6.0;
    h.a0 = 2.0;
    Rng rng(6);
    double s = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k)
        s += sample_prior(h, rng).params.pY1;
    // mean 0.75, sd sqrt(0.75 * 0.25 / 9) / sqrt(n) ~ 1e-3
    CHECK(std::abs(s / n - 0.75) < 0.005);
}

TEST_CASE("Z and X prior moments") {
    auto h = hyper_for(6, 2, 2);
    h.z_mean = 1.0;
    h.z_var = 4.0;
    Rng rng(7);
    double zs = 0, zs2 = 0, xs2 = 0;
    std::size_t nz = 0, nx = 0;
    for (int k = 0; k < 2000; ++k) {
        const auto d = sample_prior(h, rng);
        for (double z : d.params.Z) {
            zs += z;
            zs2 += z * z;
            ++nz;
        }
        for (const auto& c : d.params.components) {
            xs2 += c.X.squaredNorm();
            nx += static_cast<std::size_t>(c.X.size());
        }
    }
    const double mz = zs / double(nz);
    CHECK(mz == Approx(1.0).epsilon(0.02));
    CHECK(zs2 / double(nz) - mz * mz == Approx(4.0).epsilon(0.03));
    CHECK(xs2 / double(nx) == Approx(1.0).epsilon(0.03));
}

TEST_CASE("weights are cumulative inverse products of the auxiliaries") {
    Eigen::VectorXd theta(4);
    theta << 2.0, 0.5, 4.0, 1.0;
    const Eigen::VectorXd l = mig_weights(theta);
    CHECK(l[0] == Approx(0.5));
    CHECK(l[1] == Approx(1.0));
    CHECK(l[2] == Approx(0.25));
    CHECK(l[3] == Approx(0.25));
    Eigen::VectorXd scaled = theta;
    scaled[1] *= 3.0;
    const Eigen::VectorXd m = mig_weights(scaled);
    CHECK(m[0] == Approx(l[0]));
    for (int r = 1; r < 4; ++r)
        CHECK(m[r] == Approx(l[r] / 3.0));
    CHECK((l.array() > 0.0).all());
}

TEST_CASE("sign flip of a column leaves the log prior unchanged") {
    auto h = hyper_for(5, 3, 3);
    Rng rng(8);
    auto d = sample_prior(h, rng);
    const double before = log_prior_density(d.params, d.theta, h);
    CHECK(std::isfinite(before));
    d.params.components[1].X.col(2) *= -1.0;
    CHECK(log_prior_density(d.params, d.theta, h) == before);
}

TEST_CASE("Z block density at the prior mean") {
    auto h = hyper_for(5, 2, 2);
    Rng rng(9);
    auto d = sample_prior(h, rng);
    d.params.Z.setZero();
    const double expected = 10.0 * (-0.5 * std::log(2.0 * std::numbers::pi * 10.0));
    CHECK(log_prior_blocks(d.params, d.theta, h).z == Approx(expected).epsilon(1e-14));
}

TEST_CASE("support violations give -inf") {
    auto h = hyper_for(4, 3, 2);
    h.prior_T1 = 0.5;
    Rng rng(10);
    auto d = sample_prior(h, rng);
    d.params.T = 0;
    d.params.nu1 = d.params.nu0;
    CHECK(std::isfinite(log_prior_density(d.params, d.theta, h)));
    d.params.nu1 = Eigen::Vector3d(0.2, 0.3, 0.5);
    CHECK(log_prior_density(d.params, d.theta, h) == -std::numeric_limits<double>::infinity());

    auto e = sample_prior(h, rng);
    e.params.components[0].lambda[1] *= 2.0;
    CHECK(log_prior_density(e.params, e.theta, h) == -std::numeric_limits<double>::infinity());

    auto f = sample_prior(h, rng);
    f.params.T = 1;
    f.params.nu0 = Eigen::Vector3d(0.0, 0.5, 0.5);
    CHECK(log_prior_density(f.params, f.theta, h) == -std::numeric_limits<double>::infinity());

    h.prior_T1 = 0.0;
    f.params.nu0 = f.params.nu1;
    CHECK(log_prior_blocks(f.params, f.theta, h).t == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Dirichlet and gamma densities") {
    CHECK(log_dirichlet_density(Eigen::Vector2d(0.3, 0.7), 1.0) == Approx(0.0));
    CHECK(log_dirichlet_density(Eigen::Vector3d(0.2, 0.3, 0.5), 2.0) ==
          Approx(std::lgamma(6.0) - 3 * std::lgamma(2.0) + std::log(0.2 * 0.3 * 0.5)));
    CHECK(log_gamma_density(1.5, 2.5) == Approx(1.5 * std::log(1.5) - 1.5 - std::lgamma(2.5)));
    CHECK(log_gamma_density(0.0, 2.5) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("prior draws give valid edge probabilities") {
    auto h = hyper_for(8, 4, 3);
    Rng rng(11);
    const EdgeIndexMap map(8);
    for (int k = 0; k < 1000; ++k) {
        const auto d = sample_prior(h, rng);
        REQUIRE_NOTHROW(d.params.validate());
        for (const auto& c : d.params.components) {
            const auto pi = logistic_map(component_similarity(d.params.Z, c, map));
            for (std::size_t l = 0; l < pi.size(); ++l) {
                REQUIRE(std::isfinite(pi.log_probability(l)));
                REQUIRE(std::isfinite(pi.log_complement(l)));
                REQUIRE(pi.probability(l) >= 0.0);
                REQUIRE(pi.probability(l) <= 1.0);
            }
        }
    }
}

TEST_CASE("data simulated from a prior draw has finite likelihood under it") {
    auto h = hyper_for(10, 5, 3);
    Rng rng(12);
    for (int k = 0; k < 100; ++k) {
        const auto d = sample_prior(h, rng);
        const auto cohort = sample_cohort(d.params, 5, 5, rng);
        const MixtureEvaluator eval(d.params);
        for (const auto& s : cohort) {
            const double lp = eval.joint_log_pmf(s.label, s.edges);
            REQUIRE(std::isfinite(lp));
        }
    }
}
