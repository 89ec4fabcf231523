#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "netmix/network_model.hpp"
#include "netmix/priors.hpp"
#include "netmix/random.hpp"
#include "netmix/sampler.hpp"

namespace netmix::testing {

/// Cohort drawn directly from per-component edge probabilities (not from the
/// low-rank model): subject i in group y picks component h with weight nu_y[h].
std::vector<NetworkObservation> cohort_from_probabilities(const std::vector<Eigen::VectorXd>& pi,
                                                          const Eigen::VectorXd& nu0, const Eigen::VectorXd& nu1,
                                                          std::size_t n0, std::size_t n1, std::uint64_t seed);

/// Random parameters for small-V checks; pY1 and the weights are kept off the boundary.
MixtureParameters random_parameters(std::size_t V, std::size_t H, std::size_t R, Rng& rng);

/// Two components whose edge probabilities are base +/- gap/2 on a clique of
/// `block` nodes and equal elsewhere.
std::vector<Eigen::VectorXd> block_components(std::size_t V, std::size_t block, double base, double gap,
                                              Rng& rng);

/// Factors with Z = 0 that reproduce the given logits exactly (up to rounding);
/// R equals V and lambda holds the eigenvalues of a diagonally shifted matrix.
ComponentFactors factors_from_logits(const Eigen::VectorXd& logits);

/// Mixture parameters with one component per edge-probability vector and Z = 0.
MixtureParameters parameters_from_probabilities(const std::vector<Eigen::VectorXd>& pi, const Eigen::VectorXd& nu0,
                                                const Eigen::VectorXd& nu1, double pY1);

HyperParameters small_hyper(std::size_t V, std::size_t H, std::size_t R);

/// Wraps fixed parameter sets as kept draws of a two-group fit with n0 = n1 = 1.
PosteriorDraws draws_from(const std::vector<MixtureParameters>& params);

/// Same parameters with components relabeled by perm (new h takes old perm[h]).
MixtureParameters relabel(const MixtureParameters& p, const std::vector<std::size_t>& perm);

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(std::string_view tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace netmix::testing
