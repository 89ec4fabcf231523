#pragma once

// Brute-force reference evaluations for tiny networks (V <= 5). Shares no
// evaluation code with the model library: similarities, probabilities and
// products are recomputed here directly, in long double and linear space.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "netmix/network_model.hpp"

namespace netmix::oracle {

inline constexpr std::size_t kMaxNodes = 5;

/// Probability of every configuration a in {0,1}^L; entry k holds the
/// configuration whose bit l (least significant first) is a_l.
struct ExactPmfTable {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::vector<long double> entries;

    long double total() const;
    /// Pr(a_l = 1) obtained by summing the table.
    long double edge_marginal(std::size_t l) const;
};

/// Edge vector for configuration code k.
EdgeVector configuration(std::size_t code, std::size_t edges);

/// y = 0/1: group-conditional mixture; nullopt: mixture with weights sum_y p_Y(y) nu_hy.
ExactPmfTable enumerate_pmf(const MixtureParameters& params, std::optional<int> y);

/// Component pmf table for component h alone.
ExactPmfTable enumerate_component_pmf(const MixtureParameters& params, std::size_t h);

/// Cramer's V from the exact joint of (y, a_l) obtained by marginalizing the tables.
Eigen::VectorXd exact_cramers_v(const MixtureParameters& params);

}  // namespace netmix::oracle
