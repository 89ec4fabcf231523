#include <doctest.h>

#include <stdexcept>

#include "netmix/edge_index.hpp"

using namespace netmix;

TEST_CASE("edge count for the 68-region atlas") {
    const EdgeIndexMap map(68);
    CHECK(map.edges() == 2278);
    CHECK(EdgeIndexMap::nodes_for_edges(2278) == 68);
    CHECK_THROWS_AS(EdgeIndexMap::nodes_for_edges(7), std::invalid_argument);
}

TEST_CASE("first and last pair at V = 68") {
    const EdgeIndexMap map(68);
    CHECK(map.index(1, 0) + 1 == 1);
    CHECK(map.index(67, 66) + 1 == 2278);
}

TEST_CASE("column-wise order at V = 4") {
    const EdgeIndexMap map(4);
    const std::vector<std::pair<std::size_t, std::size_t>> expected = {{1, 0}, {2, 0}, {3, 0}, {2, 1}, {3, 1}, {3, 2}};
    CHECK(map.pairs() == expected);
    CHECK(map.index(2, 1) + 1 == 4);
}

TEST_CASE("index and pair are inverse") {
    for (std::size_t V : {2u, 3u, 7u, 20u}) {
        const EdgeIndexMap map(V);
        for (std::size_t l = 0; l < map.edges(); ++l) {
            const auto [v, u] = map.pair(l);
            REQUIRE(v > u);
            CHECK(map.index(v, u) == l);
        }
    }
}

TEST_CASE("invalid pairs are rejected") {
    const EdgeIndexMap map(4);
    CHECK_THROWS_AS(map.index(1, 1), std::invalid_argument);
    CHECK_THROWS_AS(map.index(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(map.index(4, 0), std::out_of_range);
    CHECK_THROWS_AS(map.pair(6), std::out_of_range);
    CHECK_THROWS(EdgeIndexMap(1));
}

TEST_CASE("vectorize small graphs") {
    AdjacencyMatrix a = AdjacencyMatrix::Zero(4, 4);
    CHECK(vectorize(a) == EdgeVector(6, 0));
    a.setOnes();
    CHECK(vectorize(a) == EdgeVector(6, 1));
    a.setZero();
    a(2, 1) = a(1, 2) = 1;
    CHECK(vectorize(a) == EdgeVector{0, 0, 0, 1, 0, 0});
}

TEST_CASE("vectorize ignores the diagonal") {
    const AdjacencyMatrix a = AdjacencyMatrix::Identity(4, 4);
    CHECK(vectorize(a) == EdgeVector(6, 0));
}

TEST_CASE("vectorize rejects asymmetric and non-binary matrices") {
    AdjacencyMatrix a = AdjacencyMatrix::Zero(4, 4);
    a(2, 0) = 1;
    CHECK_THROWS_AS(vectorize(a), std::invalid_argument);
    a(0, 2) = 1;
    a(3, 1) = a(1, 3) = 2;
    CHECK_THROWS_AS(vectorize(a), std::invalid_argument);
    CHECK_THROWS_AS(vectorize(AdjacencyMatrix::Zero(3, 4)), std::invalid_argument);
}

TEST_CASE("matricize(vectorize(A)) is A with a zero diagonal") {
    AdjacencyMatrix a(5, 5);
    a << 1, 1, 0, 0, 1,
         1, 0, 1, 1, 0,
         0, 1, 1, 0, 1,
         0, 1, 0, 0, 0,
         1, 0, 1, 0, 1;
    AdjacencyMatrix expected = a;
    expected.diagonal().setZero();
    const EdgeIndexMap map(5);
    CHECK(matricize(vectorize(a), map) == expected);
    const EdgeVector e = vectorize(a);
    CHECK(vectorize(matricize(e, map)) == e);
}
