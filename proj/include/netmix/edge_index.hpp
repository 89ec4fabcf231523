#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace netmix {

/// Binary edge vector in the canonical lower-triangular order.
using EdgeVector = std::vector<std::uint8_t>;

/// Adjacency matrices are small integer matrices; only 0/1 off the diagonal
/// is accepted by vectorize().
using AdjacencyMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/**
 * Bijection between node pairs (v, u), v > u, and linear edge indices.
 *
 * Edges are enumerated column by column through the strict lower triangle:
 * (1,0), (2,0), ..., (V-1,0), (2,1), ..., (V-1,V-2). All indices are
 * zero-based here; file formats that expose node numbers use one-based ids.
 */
class EdgeIndexMap {
public:
    explicit EdgeIndexMap(std::size_t nodes);

    std::size_t nodes() const { return nodes_; }
    std::size_t edges() const { return pairs_.size(); }

    /// Linear index of the pair (v, u). Requires u < v < nodes().
    std::size_t index(std::size_t v, std::size_t u) const;

    /// Inverse of index(): returns (v, u) with v > u.
    std::pair<std::size_t, std::size_t> pair(std::size_t l) const;

    const std::vector<std::pair<std::size_t, std::size_t>>& pairs() const { return pairs_; }

    static std::size_t edge_count(std::size_t nodes) { return nodes * (nodes - 1) / 2; }

    /// Node count V with V(V-1)/2 == edges; throws if no such V exists.
    static std::size_t nodes_for_edges(std::size_t edges);

private:
    std::size_t nodes_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
};

/// Lower-triangular vectorization. The diagonal is ignored; the matrix must
/// be symmetric with 0/1 entries off the diagonal.
EdgeVector vectorize(const AdjacencyMatrix& adjacency);

/// Symmetric adjacency matrix with zero diagonal.
AdjacencyMatrix matricize(std::span<const std::uint8_t> edges, const EdgeIndexMap& map);

}  // namespace netmix
