#include "netmix/edge_index.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace netmix {

EdgeIndexMap::EdgeIndexMap(std::size_t nodes) : nodes_(nodes) {
    if (nodes < 2)
        throw std::invalid_argument(fmt::format("edge map needs at least 2 nodes, got {}", nodes));
    pairs_.reserve(edge_count(nodes));
    for (std::size_t u = 0; u + 1 < nodes; ++u)
        for (std::size_t v = u + 1; v < nodes; ++v)
            pairs_.emplace_back(v, u);
}

std::size_t EdgeIndexMap::index(std::size_t v, std::size_t u) const {
    if (v >= nodes_ || u >= nodes_)
        throw std::out_of_range(fmt::format("node pair ({}, {}) outside 0..{}", v, u, nodes_ - 1));
    if (u >= v)
        throw std::invalid_argument(fmt::format("edge index needs v > u, got ({}, {})", v, u));
    // columns 0..u-1 hold (V-1) + (V-2) + ... + (V-u) entries
    return u * nodes_ - u * (u + 1) / 2 + (v - u - 1);
}

std::pair<std::size_t, std::size_t> EdgeIndexMap::pair(std::size_t l) const {
    if (l >= pairs_.size())
        throw std::out_of_range(fmt::format("edge index {} outside 0..{}", l, pairs_.size() - 1));
    return pairs_[l];
}

std::size_t EdgeIndexMap::nodes_for_edges(std::size_t edges) {
    const auto v = static_cast<std::size_t>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * double(edges))) / 2.0));
    if (v < 2 || edge_count(v) != edges)
        throw std::invalid_argument(fmt::format("{} is not a triangular edge count", edges));
    return v;
}

EdgeVector vectorize(const AdjacencyMatrix& adjacency) {
    if (adjacency.rows() != adjacency.cols())
        throw std::invalid_argument(
            fmt::format("adjacency must be square, got {}x{}", adjacency.rows(), adjacency.cols()));
    const EdgeIndexMap map(static_cast<std::size_t>(adjacency.rows()));
    EdgeVector out(map.edges());
    for (std::size_t l = 0; l < map.edges(); ++l) {
        const auto [v, u] = map.pair(l);
        const int lower = adjacency(v, u);
        const int upper = adjacency(u, v);
        if (lower != upper)
            throw std::invalid_argument(fmt::format(
                "adjacency not symmetric at row {}, column {} ({} vs {})", v + 1, u + 1, lower, upper));
        if (lower != 0 && lower != 1)
            throw std::invalid_argument(
                fmt::format("non-binary adjacency entry {} at row {}, column {}", lower, v + 1, u + 1));
        out[l] = static_cast<std::uint8_t>(lower);
    }
    return out;
}

AdjacencyMatrix matricize(std::span<const std::uint8_t> edges, const EdgeIndexMap& map) {
    if (edges.size() != map.edges())
        throw std::invalid_argument(
            fmt::format("edge vector has length {}, expected {}", edges.size(), map.edges()));
    AdjacencyMatrix a = AdjacencyMatrix::Zero(map.nodes(), map.nodes());
    for (std::size_t l = 0; l < edges.size(); ++l) {
        const auto [v, u] = map.pair(l);
        a(v, u) = a(u, v) = edges[l];
    }
    return a;
}

}  // namespace netmix
