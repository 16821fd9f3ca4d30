#pragma once

#include "dsparse/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace dsparse {

/**
 * min_beta  beta^T Psi beta - 2 q^T beta + sum_l gamma_l |beta_l|
 *
 * Psi symmetric positive definite, gamma >= 0. The quadratic carries no
 * 1/2 factor, so the per-coordinate threshold is gamma_l / 2.
 */
template <class Scalar>
struct QuadraticL1Problem {
    Matrix<Scalar> Psi;
    Vector<Scalar> q;
    Vector<Scalar> gamma;

    Eigen::Index dim() const noexcept { return q.size(); }

    /// Throws ConfigError on shape mismatch, asymmetry beyond 1e-10
    /// (relative to the largest entry), non-positive diagonal or negative
    /// weights.
    void validate() const
    {
        const auto m = q.size();
        if (Psi.rows() != m || Psi.cols() != m || gamma.size() != m) {
            throw ConfigError("problem dimensions do not match");
        }
        const Scalar scale = std::max<Scalar>(Scalar(1), Psi.cwiseAbs().maxCoeff());
        if ((Psi - Psi.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-10) * scale) {
            throw ConfigError("Psi must be symmetric");
        }
        if ((Psi.diagonal().array() <= Scalar(0)).any()) {
            throw ConfigError("Psi must have a positive diagonal");
        }
        if ((gamma.array() < Scalar(0)).any()) {
            throw ConfigError("penalty weights must be nonnegative");
        }
    }
};

template <class Scalar>
struct SolveReport {
    Vector<Scalar> beta;
    std::size_t iterations = 0;
    Scalar kkt_residual = 0;
    bool converged = false;
};

/// `tol` bounds the per-iteration move; `kkt_tol` bounds the stationarity
/// residual relative to 1 + ||q||. Both must hold for converged = true.
template <class Scalar>
struct SolverOptions {
    Scalar tol = Scalar(1e-10);
    std::size_t max_iters = 100000;
    Scalar kkt_tol = Scalar(1e-8);
};

/// sign(z) * max(|z| - gamma, 0); returns an exact zero inside the band.
template <class Scalar>
inline Scalar soft_threshold(Scalar z, Scalar gamma)
{
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return Scalar(0);
}

template <class Scalar>
Scalar objective(const QuadraticL1Problem<Scalar>& p, const Vector<Scalar>& beta)
{
    return beta.dot(p.Psi * beta) - Scalar(2) * p.q.dot(beta) +
           p.gamma.dot(beta.cwiseAbs());
}

/**
 * Largest violation of 0 in 2(Psi beta - q) + gamma o d|beta|.
 * Nonzero coordinates need the gradient to cancel gamma_l sgn(beta_l);
 * zero coordinates only need |g_l| <= gamma_l.
 */
template <class Scalar>
Scalar kkt_residual(const QuadraticL1Problem<Scalar>& p, const Vector<Scalar>& beta)
{
    const Vector<Scalar> g = Scalar(2) * (p.Psi * beta - p.q);
    Scalar worst = 0;
    for (Eigen::Index l = 0; l < beta.size(); ++l) {
        Scalar r;
        if (beta(l) != Scalar(0)) {
            const Scalar s = beta(l) > Scalar(0) ? Scalar(1) : Scalar(-1);
            r = std::abs(g(l) + p.gamma(l) * s);
        } else {
            r = std::max(std::abs(g(l)) - p.gamma(l), Scalar(0));
        }
        worst = std::max(worst, r);
    }
    return worst;
}

namespace detail {

template <class Scalar>
void finish(const QuadraticL1Problem<Scalar>& p, const SolverOptions<Scalar>& opts,
            bool settled, SolveReport<Scalar>& report)
{
    report.kkt_residual = kkt_residual(p, report.beta);
    report.converged = settled && report.kkt_residual <= opts.kkt_tol * (Scalar(1) + p.q.norm());
}

// Re-solves the stationarity equations on the current support with the
// signs held fixed. Kept only if no sign flips and the KKT residual does
// not get worse; the support itself never changes here.
template <class Scalar>
void polish_on_support(const QuadraticL1Problem<Scalar>& p, Vector<Scalar>& beta)
{
    std::vector<Eigen::Index> support;
    for (Eigen::Index l = 0; l < beta.size(); ++l) {
        if (beta(l) != Scalar(0)) support.push_back(l);
    }
    if (support.empty()) return;

    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix<Scalar> sub(k, k);
    Vector<Scalar> rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto la = support[a];
        const Scalar s = beta(la) > Scalar(0) ? Scalar(1) : Scalar(-1);
        rhs(a) = p.q(la) - p.gamma(la) * s / Scalar(2);
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = p.Psi(la, support[b]);
    }
    Eigen::LLT<Matrix<Scalar>> llt(sub);
    if (llt.info() != Eigen::Success) return;
    const Vector<Scalar> solved = llt.solve(rhs);

    Vector<Scalar> candidate = Vector<Scalar>::Zero(beta.size());
    for (Eigen::Index a = 0; a < k; ++a) {
        const auto la = support[a];
        if (!std::isfinite(solved(a)) || solved(a) == Scalar(0) ||
            (solved(a) > Scalar(0)) != (beta(la) > Scalar(0))) {
            return;
        }
        candidate(la) = solved(a);
    }
    if (kkt_residual(p, candidate) <= kkt_residual(p, beta)) beta = candidate;
}

} // namespace detail

/**
 * Cyclic coordinate descent with soft-thresholding:
 *   beta_l <- S(q_l - sum_{s != l} Psi_ls beta_s, gamma_l / 2) / Psi_ll.
 * Stops once a full sweep moves no coordinate by more than `tol`.
 * Returns converged = false (not an exception) when max_iters sweeps run out.
 */
template <class Scalar>
SolveReport<Scalar> coordinate_descent(const QuadraticL1Problem<Scalar>& p,
                                       const Vector<Scalar>& beta0,
                                       const SolverOptions<Scalar>& opts = {})
{
    const auto m = p.dim();
    SolveReport<Scalar> report;
    report.beta = beta0.size() == m ? beta0 : Vector<Scalar>::Zero(m);

    // Psi * beta kept current; each coordinate move is a rank-one update.
    Vector<Scalar> psi_beta = p.Psi * report.beta;
    bool settled = false;
    for (std::size_t sweep = 0; sweep < opts.max_iters; ++sweep) {
        Scalar max_change = 0;
        for (Eigen::Index l = 0; l < m; ++l) {
            const Scalar old = report.beta(l);
            const Scalar z = p.q(l) - (psi_beta(l) - p.Psi(l, l) * old);
            const Scalar next = soft_threshold(z, p.gamma(l) / Scalar(2)) / p.Psi(l, l);
            const Scalar delta = next - old;
            if (delta != Scalar(0)) {
                report.beta(l) = next;
                psi_beta.noalias() += delta * p.Psi.col(l);
                max_change = std::max(max_change, std::abs(delta));
            }
        }
        report.iterations = sweep + 1;
        if (max_change <= opts.tol) {
            settled = true;
            break;
        }
    }
    if (settled) detail::polish_on_support(p, report.beta);
    detail::finish(p, opts, settled, report);
    return report;
}

/**
 * Proximal gradient (ISTA) with step 1/L, L = 2 lambda_max(Psi):
 *   beta <- S(beta - (2 Psi beta - 2 q) / L, gamma / L).
 * Independent of coordinate_descent; used to cross-check it.
 * `iterations` counts steps that moved beta by more than `tol`.
 */
template <class Scalar>
SolveReport<Scalar> prox_gradient_oracle(const QuadraticL1Problem<Scalar>& p,
                                         const SolverOptions<Scalar>& opts = {},
                                         const Vector<Scalar>& beta0 = {})
{
    const auto m = p.dim();
    const Scalar lipschitz = Scalar(2) * lambda_max(p.Psi);
    const Scalar step = Scalar(1) / lipschitz;

    SolveReport<Scalar> report;
    report.beta = beta0.size() == m ? beta0 : Vector<Scalar>::Zero(m);
    Vector<Scalar> next(m);
    bool settled = false;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        const Vector<Scalar> grad = Scalar(2) * (p.Psi * report.beta - p.q);
        for (Eigen::Index l = 0; l < m; ++l) {
            next(l) = soft_threshold(report.beta(l) - step * grad(l), p.gamma(l) * step);
        }
        const Scalar change = (next - report.beta).cwiseAbs().maxCoeff();
        report.beta.swap(next);
        if (change <= opts.tol) {
            settled = true;
            break;
        }
        report.iterations = it + 1;
    }
    detail::finish(p, opts, settled, report);
    return report;
}

} // namespace dsparse
