#pragma once

// Shared generators for the test suites.

#include "dsparse/graph.hpp"
#include "dsparse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace testutil {

struct EdgeList {
    std::size_t n = 1;
    std::vector<dsparse::Edge> edges;
};

inline std::size_t node_count(const EdgeList& e) { return e.n; }

/// Random spanning tree on n in [1, max_n] nodes plus a few extra chords.
inline EdgeList random_connected_edges(std::mt19937_64& gen, std::size_t max_n)
{
    EdgeList out;
    out.n = std::uniform_int_distribution<std::size_t>(1, max_n)(gen);
    std::set<dsparse::Edge> seen;
    for (std::size_t v = 1; v < out.n; ++v) {
        const auto u = std::uniform_int_distribution<std::size_t>(0, v - 1)(gen);
        seen.insert({u, v});
    }
    if (out.n > 2) {
        const auto extra = std::uniform_int_distribution<std::size_t>(0, out.n)(gen);
        std::uniform_int_distribution<std::size_t> node(0, out.n - 1);
        for (std::size_t k = 0; k < extra; ++k) {
            auto a = node(gen), b = node(gen);
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            seen.insert({a, b});
        }
    }
    out.edges.assign(seen.begin(), seen.end());
    std::shuffle(out.edges.begin(), out.edges.end(), gen);
    return out;
}

inline dsparse::MatrixXd random_gaussian(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols)
{
    std::normal_distribution<double> nd;
    dsparse::MatrixXd out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = nd(gen);
    }
    return out;
}

/// Q diag(ev) Q^T with log-uniform eigenvalues in [scale, scale * cond].
inline dsparse::MatrixXd random_spd(std::mt19937_64& gen, Eigen::Index m, double cond, double scale = 1.0)
{
    const dsparse::MatrixXd Q = Eigen::HouseholderQR<dsparse::MatrixXd>(random_gaussian(gen, m, m)).householderQ();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    dsparse::VectorXd ev(m);
    for (Eigen::Index k = 0; k < m; ++k) ev(k) = scale * std::pow(cond, u(gen));
    if (m > 1) {
        ev(0) = scale;
        ev(1) = scale * cond;
    }
    dsparse::MatrixXd out = Q * ev.asDiagonal() * Q.transpose();
    return (out + out.transpose()) / 2.0;
}

inline dsparse::QuadraticL1Problem<double> random_problem(std::mt19937_64& gen, Eigen::Index m, double cond)
{
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    dsparse::QuadraticL1Problem<double> p;
    p.Psi = random_spd(gen, m, cond);
    p.q.resize(m);
    p.gamma.resize(m);
    for (Eigen::Index l = 0; l < m; ++l) {
        p.q(l) = 3.0 * nd(gen);
        // mix of zero, moderate and large weights so that supports vary
        const double pick = u(gen);
        p.gamma(l) = pick < 0.2 ? 0.0 : (pick < 0.8 ? 2.0 * u(gen) : 10.0 * u(gen));
    }
    return p;
}

} // namespace testutil
