#pragma once

#include "dsparse/types.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace dsparse {

/// Unordered node pair, 0-based. Stored with first < second.
using Edge = std::pair<std::size_t, std::size_t>;

/**
 * Undirected sensor graph with a symmetric stochastic weight matrix.
 *
 * Nodes are 0-based internally; config files and CSV outputs use 1-based
 * labels. Every node is its own neighbor. Immutable once built, so one
 * instance can be shared read-only between workers.
 */
class NetworkGraph {
public:
    /// Validates `adjacency` against `edges`: nonnegative, exactly
    /// symmetric, rows summing to 1 within 1e-12, zero off the edge set.
    NetworkGraph(std::size_t n, std::vector<Edge> edges, MatrixXd adjacency);

    std::size_t size() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const MatrixXd& adjacency() const noexcept { return adjacency_; }
    double weight(std::size_t i, std::size_t j) const { return adjacency_(i, j); }

    /// N_i, self-inclusive, ascending.
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i]; }

    /// |N_i| including i itself.
    std::size_t degree(std::size_t i) const { return neighbors_[i].size(); }

    /// Identity weights on n isolated nodes (each sensor uses only its own data).
    static NetworkGraph isolated(std::size_t n);

private:
    std::size_t n_;
    std::vector<Edge> edges_;
    MatrixXd adjacency_;
    std::vector<std::vector<std::size_t>> neighbors_;
};

/// Normalizes and validates an edge list: rejects self-loops given
/// explicitly, duplicates (in either orientation) and out-of-range nodes.
std::vector<Edge> normalize_edges(std::size_t n, const std::vector<Edge>& edges);

/**
 * Metropolis weights: a_ij = 1 / max(n_i, n_j) on edges and
 * a_ii = 1 - sum_{j != i} a_ij, where n_i = |N_i| counts the node itself.
 */
NetworkGraph metropolis_weights(const std::vector<Edge>& edges, std::size_t n);

bool is_connected(const NetworkGraph& g);

/// Longest shortest path in hops; 0 for a single node. Throws ConfigError
/// when the graph is disconnected.
std::size_t diameter(const NetworkGraph& g);

/// A^l by repeated multiplication; identity for l = 0.
MatrixXd adjacency_power(const NetworkGraph& g, std::size_t l);

/// Caches A^0, A^1, ... so that a sequence of increasing powers costs one
/// multiply each.
class AdjacencyPowers {
public:
    explicit AdjacencyPowers(const NetworkGraph& g);
    const MatrixXd& operator()(std::size_t l);

private:
    MatrixXd base_;
    std::vector<MatrixXd> powers_;
};

NetworkGraph ring_graph(std::size_t n);

} // namespace dsparse
