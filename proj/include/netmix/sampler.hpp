#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "netmix/edge_index.hpp"
#include "netmix/network_model.hpp"
#include "netmix/priors.hpp"
#include "netmix/random.hpp"

namespace netmix {

struct SamplerConfig {
    std::size_t n_iter = 5000;
    std::size_t burn_in = 1000;
    std::size_t thin = 4;
    std::uint64_t seed = 1;
    bool record_pi = false;
    unsigned threads = 1;  // does not affect results

    std::size_t kept() const { return n_iter > burn_in && thin > 0 ? (n_iter - burn_in) / thin : 0; }
    void validate() const;
};

/// CRC-32 over V, the subject count, and every (label, edge vector) in order.
std::uint32_t data_checksum(const std::vector<NetworkObservation>& subjects);

/// Training data in the layout the sweeps use.
class ChainData {
public:
    /// Infers V from the edge vectors; throws on empty or inconsistent data.
    explicit ChainData(const std::vector<NetworkObservation>& subjects);
    /// Allows an empty cohort for a given node count.
    ChainData(const std::vector<NetworkObservation>& subjects, std::size_t nodes);

    const EdgeIndexMap& map() const { return map_; }
    std::size_t subjects() const { return labels_.size(); }
    std::size_t edges() const { return map_.edges(); }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const std::uint8_t> edges(std::size_t i) const { return raw_[i]; }
    /// n x L matrix of 0/1 values.
    const Eigen::MatrixXd& edge_matrix() const { return matrix_; }
    std::size_t group_size(int y) const { return y == 0 ? n0_ : n1_; }
    std::uint32_t checksum() const { return checksum_; }

private:
    void fill(const std::vector<NetworkObservation>& subjects);

    EdgeIndexMap map_;
    std::vector<EdgeVector> raw_;
    std::vector<int> labels_;
    Eigen::MatrixXd matrix_;
    std::size_t n0_ = 0, n1_ = 0;
    std::uint32_t checksum_ = 0;
};

struct AugmentedState {
    MixtureParameters params;
    MigAuxiliary theta;
    std::vector<int> assignments;  // component of each subject, 0..H-1
    Eigen::MatrixXd omega;         // n x L Polya-Gamma variables
};

struct DrawSnapshot {
    std::size_t iteration = 0;  // 1-based sweep number
    MixtureParameters params;
    MigAuxiliary theta;
    std::vector<int> assignments;
    Eigen::MatrixXd pi;  // H x L, only with SamplerConfig::record_pi
};

struct PosteriorMeta {
    HyperParameters hyper;
    SamplerConfig config;
    std::size_t nodes = 0;
    std::size_t subjects = 0;
    std::size_t n0 = 0, n1 = 0;
    std::uint32_t data_checksum = 0;
    bool two_group() const { return n0 > 0 && n1 > 0; }
};

struct PosteriorDraws {
    PosteriorMeta meta;
    std::vector<DrawSnapshot> draws;
    std::vector<double> log_joint_trace;  // one entry per sweep
};

/// H x L matrix whose row h is S^(h) = Z + D^(h).
Eigen::MatrixXd similarity_matrix(const MixtureParameters& params, const EdgeIndexMap& map);

/// Initial state: a prior draw, components drawn from nu_{y_i}, omega zero.
AugmentedState initial_state(const ChainData& data, const HyperParameters& hyper, Rng& rng);

/// G_i ~ Categorical(nu_{h y_i} prod_l Bern(a_il; pi_l^(h))), omega integrated out.
void update_assignments(AugmentedState& state, const ChainData& data, Rng& rng, unsigned threads = 1);

/// omega_il ~ PG(1, S_l^(G_i)).
void update_omega(AugmentedState& state, const ChainData& data, Rng& rng, unsigned threads = 1);

/// Conjugate Gaussian update of each Z_l.
void update_Z(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng);

/// Row-wise Gibbs for the scaled coordinates of every component, then the
/// multiplicative-gamma auxiliaries; lambda and X are recomputed from them.
void update_factors(AugmentedState& state, const ChainData& data, const HyperParameters& hyper,
                    Rng& rng);

/// Pr(T = 1 | assignments) with nu integrated out (Dirichlet-multinomial).
double posterior_prob_T1(std::span<const std::size_t> counts0, std::span<const std::size_t> counts1,
                         double concentration, double prior_T1);

/// log Dirichlet-multinomial probability of one assignment sequence with these counts.
double log_dirichlet_multinomial(std::span<const std::size_t> counts, double concentration);

/// Draws T collapsed over nu, then nu given T and the assignment counts.
void update_weights_and_T(AugmentedState& state, const ChainData& data, const HyperParameters& hyper,
                          Rng& rng);

/// pY1 ~ Beta(a1 + n1, a0 + n0).
void update_pY(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng);

/// One systematic scan: assignments, omega, Z, factors, weights and T, pY.
void sweep(AugmentedState& state, const ChainData& data, const HyperParameters& hyper, Rng& rng,
           unsigned threads = 1);

/// Complete-data log joint density (omega excluded).
double log_joint(const AugmentedState& state, const ChainData& data, const HyperParameters& hyper);

PosteriorDraws run_chain(const std::vector<NetworkObservation>& data, HyperParameters hyper,
                         const SamplerConfig& config);

}  // namespace netmix
