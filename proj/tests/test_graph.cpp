#include "doctest.h"

#include "dsparse/graph.hpp"
#include "test_util.hpp"

#include <random>

using namespace dsparse;

TEST_CASE("metropolis: two nodes, one edge")
{
    const auto g = metropolis_weights({{0, 1}}, 2);
    MatrixXd expected(2, 2);
    expected << 0.5, 0.5, 0.5, 0.5;
    CHECK(g.adjacency() == expected);
    CHECK(g.degree(0) == 2);
}

TEST_CASE("metropolis: single node")
{
    const auto g = metropolis_weights({}, 1);
    CHECK(g.adjacency()(0, 0) == 1.0);
    CHECK(diameter(g) == 0);
}

TEST_CASE("metropolis: 3-node star centred on node 1")
{
    const auto g = metropolis_weights({{0, 1}, {0, 2}}, 3);
    CHECK(g.weight(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(g.weight(0, 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(g.weight(0, 0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(g.weight(1, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    CHECK(g.weight(1, 2) == 0.0);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(g.adjacency().row(i).sum() - 1.0) <= 1e-12);
}

TEST_CASE("metropolis rejects bad edge lists")
{
    CHECK_THROWS_AS(metropolis_weights({{0, 1}, {1, 0}}, 2), ConfigError);
    CHECK_THROWS_AS(metropolis_weights({{0, 1}, {0, 1}}, 2), ConfigError);
    CHECK_THROWS_AS(metropolis_weights({{0, 2}}, 2), ConfigError);
    CHECK_THROWS_AS(metropolis_weights({{1, 1}}, 2), ConfigError);
    CHECK_THROWS_AS(metropolis_weights({}, 0), ConfigError);
}

TEST_CASE("explicit adjacency is validated")
{
    MatrixXd good(2, 2);
    good << 0.25, 0.75, 0.75, 0.25;
    CHECK_NOTHROW(NetworkGraph(2, {{0, 1}}, good));

    MatrixXd asym = good;
    asym(0, 1) = 0.7;
    asym(0, 0) = 0.3;
    CHECK_THROWS_AS(NetworkGraph(2, {{0, 1}}, asym), ConfigError);

    // weight on a pair that is not an edge
    CHECK_THROWS_AS(NetworkGraph(2, {}, good), ConfigError);

    MatrixXd not_stochastic(2, 2);
    not_stochastic << 0.5, 0.25, 0.25, 0.5;
    CHECK_THROWS_AS(NetworkGraph(2, {{0, 1}}, not_stochastic), ConfigError);

    MatrixXd negative(2, 2);
    negative << 1.5, -0.5, -0.5, 1.5;
    CHECK_THROWS_AS(NetworkGraph(2, {{0, 1}}, negative), ConfigError);
}

TEST_CASE("connectivity")
{
    CHECK(is_connected(metropolis_weights({{0, 1}}, 2)));
    CHECK_FALSE(is_connected(metropolis_weights({}, 2)));
    CHECK(is_connected(ring_graph(6)));
    CHECK_THROWS_AS(diameter(metropolis_weights({}, 2)), ConfigError);
}

TEST_CASE("diameter")
{
    CHECK(diameter(metropolis_weights({{0, 1}, {1, 2}, {0, 2}}, 3)) == 1);
    CHECK(diameter(metropolis_weights({{0, 1}, {1, 2}}, 3)) == 2);
    CHECK(diameter(ring_graph(6)) == 3);
}

TEST_CASE("adjacency powers")
{
    const auto two = metropolis_weights({{0, 1}}, 2);
    CHECK(adjacency_power(two, 0) == MatrixXd::Identity(2, 2));
    CHECK((adjacency_power(two, 2) - two.adjacency()).cwiseAbs().maxCoeff() == 0.0);

    const auto ring = ring_graph(6);
    const auto D = diameter(ring);
    CHECK(adjacency_power(ring, D).minCoeff() > 0.0);
    // one step short of the diameter some pair is still unreachable
    CHECK(adjacency_power(ring, D - 1).minCoeff() == 0.0);

    AdjacencyPowers cache(ring);
    CHECK((cache(5) - adjacency_power(ring, 5)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((cache(2) - adjacency_power(ring, 2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("property: random connected graphs keep the weight invariants")
{
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        const auto edges = testutil::random_connected_edges(gen, 12);
        const std::size_t n = testutil::node_count(edges);
        const auto g = metropolis_weights(edges.edges, n);
        const auto& A = g.adjacency();
        REQUIRE(is_connected(g));
        CHECK(A == A.transpose());
        CHECK(A.minCoeff() >= 0.0);
        CHECK((A.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
        for (std::size_t i = 0; i < n; ++i) CHECK(g.weight(i, i) > 0.0);

        AdjacencyPowers powers(g);
        for (std::size_t l = 0; l <= 20; ++l) {
            CHECK((powers(l).rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-10);
        }
        CHECK(powers(diameter(g)).minCoeff() > 0.0);
    }
}
