#include "dsparse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

namespace dsparse {

namespace {

constexpr double kRowSumTol = 1e-12;

std::string edge_path(std::size_t k) { return "graph.edges[" + std::to_string(k) + "]"; }

// BFS hop counts from `src`; unreachable nodes keep SIZE_MAX.
std::vector<std::size_t> hops_from(const NetworkGraph& g, std::size_t src)
{
    std::vector<std::size_t> dist(g.size(), static_cast<std::size_t>(-1));
    std::queue<std::size_t> frontier;
    dist[src] = 0;
    frontier.push(src);
    while (!frontier.empty()) {
        const auto u = frontier.front();
        frontier.pop();
        for (auto v : g.neighbors(u)) {
            if (dist[v] == static_cast<std::size_t>(-1)) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

} // namespace

std::vector<Edge> normalize_edges(std::size_t n, const std::vector<Edge>& edges)
{
    std::set<Edge> seen;
    std::vector<Edge> out;
    out.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
        auto [a, b] = edges[k];
        if (a >= n || b >= n) {
            throw ConfigError("node index out of range", edge_path(k));
        }
        if (a == b) {
            throw ConfigError("self-loops are implicit and must not be listed", edge_path(k));
        }
        if (a > b) std::swap(a, b);
        if (!seen.insert({a, b}).second) {
            throw ConfigError("duplicate edge", edge_path(k));
        }
        out.emplace_back(a, b);
    }
    return out;
}

NetworkGraph::NetworkGraph(std::size_t n, std::vector<Edge> edges, MatrixXd adjacency)
    : n_(n), edges_(normalize_edges(n, edges)), adjacency_(std::move(adjacency)), neighbors_(n)
{
    if (n_ == 0) throw ConfigError("graph needs at least one node", "n");
    if (adjacency_.rows() != static_cast<Eigen::Index>(n_) ||
        adjacency_.cols() != static_cast<Eigen::Index>(n_)) {
        throw ConfigError("adjacency must be n x n", "adjacency");
    }

    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Identity(n_, n_);
    for (const auto& [a, b] : edges_) {
        allowed(a, b) = allowed(b, a) = true;
    }

    for (std::size_t i = 0; i < n_; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const double w = adjacency_(i, j);
            if (!std::isfinite(w) || w < 0.0) {
                throw ConfigError("weights must be finite and nonnegative", "adjacency");
            }
            if (w != adjacency_(j, i)) {
                throw ConfigError("adjacency must be symmetric", "adjacency");
            }
            if (!allowed(i, j) && w != 0.0) {
                throw ConfigError("nonzero weight between non-adjacent nodes", "adjacency");
            }
            row += w;
        }
        if (std::abs(row - 1.0) > kRowSumTol) {
            throw ConfigError("adjacency rows must sum to 1", "adjacency");
        }
        for (std::size_t j = 0; j < n_; ++j) {
            if (allowed(i, j)) neighbors_[i].push_back(j);
        }
    }
}

NetworkGraph NetworkGraph::isolated(std::size_t n)
{
    return NetworkGraph(n, {}, MatrixXd::Identity(n, n));
}

NetworkGraph metropolis_weights(const std::vector<Edge>& edges, std::size_t n)
{
    if (n == 0) throw ConfigError("graph needs at least one node", "n");
    const auto normalized = normalize_edges(n, edges);

    std::vector<std::size_t> degree(n, 1); // self-inclusive
    for (const auto& [a, b] : normalized) {
        ++degree[a];
        ++degree[b];
    }

    MatrixXd a = MatrixXd::Zero(n, n);
    for (const auto& [i, j] : normalized) {
        const double w = 1.0 / static_cast<double>(std::max(degree[i], degree[j]));
        a(i, j) = w;
        a(j, i) = w;
    }
    for (std::size_t i = 0; i < n; ++i) {
        // Summed in column order so that the row sum reproduces 1 closely.
        double off = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) off += a(i, j);
        }
        a(i, i) = 1.0 - off;
    }
    return NetworkGraph(n, normalized, std::move(a));
}

bool is_connected(const NetworkGraph& g)
{
    const auto dist = hops_from(g, 0);
    return std::none_of(dist.begin(), dist.end(),
                        [](std::size_t d) { return d == static_cast<std::size_t>(-1); });
}

std::size_t diameter(const NetworkGraph& g)
{
    std::size_t best = 0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        for (auto d : hops_from(g, s)) {
            if (d == static_cast<std::size_t>(-1)) {
                throw ConfigError("communication graph must be connected", "graph.edges");
            }
            best = std::max(best, d);
        }
    }
    return best;
}

MatrixXd adjacency_power(const NetworkGraph& g, std::size_t l)
{
    MatrixXd out = MatrixXd::Identity(g.size(), g.size());
    for (std::size_t k = 0; k < l; ++k) {
        out = out * g.adjacency();
    }
    return out;
}

AdjacencyPowers::AdjacencyPowers(const NetworkGraph& g) : base_(g.adjacency())
{
    powers_.push_back(MatrixXd::Identity(base_.rows(), base_.cols()));
}

const MatrixXd& AdjacencyPowers::operator()(std::size_t l)
{
    while (powers_.size() <= l) {
        powers_.push_back(powers_.back() * base_);
    }
    return powers_[l];
}

NetworkGraph ring_graph(std::size_t n)
{
    std::vector<Edge> edges;
    if (n == 2) {
        edges.emplace_back(0, 1);
    } else if (n > 2) {
        for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    }
    return metropolis_weights(edges, n);
}

} // namespace dsparse
