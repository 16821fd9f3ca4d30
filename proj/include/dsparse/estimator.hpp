#pragma once

#include "dsparse/graph.hpp"
#include "dsparse/model.hpp"
#include "dsparse/parallel.hpp"
#include "dsparse/solver.hpp"
#include "dsparse/types.hpp"

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace dsparse {

/**
 * Recursive state of one sensor.
 *
 * The information form is kept: P_inv and q = sum a^{(.)} (phi y) plus the
 * P0 seed term, so that theta_ls solves P_inv theta_ls = q. P itself is
 * never formed.
 */
template <class Scalar>
struct SensorState {
    Matrix<Scalar> P_inv;
    Vector<Scalar> q;
    Vector<Scalar> theta_ls;
    Vector<Scalar> xi;
    std::vector<std::size_t> H; // {l : xi(l) == 0}, 0-based
    Scalar alpha = 0;
    Spectrum<Scalar> spectrum{0, 0}; // of P_inv
    bool log_floored = false;        // theta_hat bonus hit the log floor this round
    std::size_t solver_iterations = 0;
};

template <class Scalar>
struct NetworkState {
    std::vector<SensorState<Scalar>> sensors;
    std::size_t t = 0;

    std::size_t size() const noexcept { return sensors.size(); }
    Eigen::Index dim() const noexcept
    {
        return sensors.empty() ? 0 : sensors.front().theta_ls.size();
    }
};

template <class Scalar>
std::vector<std::size_t> zero_indices(const Vector<Scalar>& v)
{
    std::vector<std::size_t> out;
    for (Eigen::Index l = 0; l < v.size(); ++l) {
        if (v(l) == Scalar(0)) out.push_back(static_cast<std::size_t>(l));
    }
    return out;
}

/// Every sensor starts from P_inv = P0^{-1}, q = P0^{-1} theta0, so the
/// implied estimate at t = 0 is theta0. Throws ConfigError unless P0 is SPD.
template <class Scalar>
NetworkState<Scalar> init_state(std::size_t n, const Matrix<Scalar>& P0,
                                const Vector<Scalar>& theta0)
{
    const auto m = theta0.size();
    if (P0.rows() != m || P0.cols() != m) throw ConfigError("P0 must be m x m", "estimator.P0");
    if ((P0 - P0.transpose()).cwiseAbs().maxCoeff() > Scalar(0)) {
        throw ConfigError("P0 must be symmetric", "estimator.P0");
    }
    Eigen::LLT<Matrix<Scalar>> llt(P0);
    if (llt.info() != Eigen::Success || lambda_min(P0) <= Scalar(0)) {
        throw ConfigError("P0 must be positive definite", "estimator.P0");
    }
    Matrix<Scalar> P_inv = llt.solve(Matrix<Scalar>::Identity(m, m));
    P_inv = (P_inv + P_inv.transpose()) / Scalar(2);

    SensorState<Scalar> s;
    s.P_inv = P_inv;
    s.q = P_inv * theta0;
    s.theta_ls = theta0;
    s.xi = theta0;
    s.H = zero_indices(theta0);
    s.spectrum = extreme_eigenvalues(P_inv);

    NetworkState<Scalar> net;
    net.sensors.assign(n, s);
    return net;
}

namespace detail {

template <class Scalar>
void check_observations(const NetworkState<Scalar>& net, const NetworkGraph& g,
                        const std::vector<Observation>& obs)
{
    if (g.size() != net.size() || obs.size() != net.size()) {
        throw ConfigError("graph, state and observations disagree on the sensor count");
    }
    for (const auto& o : obs) {
        if (o.phi.size() != net.dim()) throw ConfigError("regressor dimension mismatch");
    }
}

} // namespace detail

/**
 * One synchronous round of distributed least squares:
 *   P_inv_i <- sum_{j in N_i} a_ij (P_inv_j + phi_j phi_j^T)
 *   q_i     <- sum_{j in N_i} a_ij (q_j + phi_j y_j)
 *   theta_i  = P_inv_i^{-1} q_i   (Cholesky)
 * Reads only `net`; xi, H and alpha are carried over unchanged.
 * Throws NumericalError with the sensor index if Cholesky fails.
 */
template <class Scalar>
NetworkState<Scalar> dls_round(const NetworkState<Scalar>& net, const NetworkGraph& g,
                               const std::vector<Observation>& obs, std::size_t workers = 1)
{
    detail::check_observations(net, g, obs);
    const std::size_t n = net.size();

    std::vector<Matrix<Scalar>> info(n);
    std::vector<Vector<Scalar>> vec(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Vector<Scalar> phi = obs[j].phi.template cast<Scalar>();
        info[j] = net.sensors[j].P_inv + phi * phi.transpose();
        vec[j] = net.sensors[j].q + phi * Scalar(obs[j].y);
    }

    NetworkState<Scalar> next;
    next.t = net.t + 1;
    next.sensors.resize(n);
    parallel_for(n, workers, [&](std::size_t i) {
        auto& s = next.sensors[i];
        const auto& prev = net.sensors[i];
        s.P_inv = Matrix<Scalar>::Zero(net.dim(), net.dim());
        s.q = Vector<Scalar>::Zero(net.dim());
        for (auto j : g.neighbors(i)) {
            const Scalar a = Scalar(g.weight(i, j));
            s.P_inv.noalias() += a * info[j];
            s.q.noalias() += a * vec[j];
        }
        s.spectrum = extreme_eigenvalues(s.P_inv);

        Eigen::LLT<Matrix<Scalar>> llt(s.P_inv);
        if (llt.info() != Eigen::Success || !(s.spectrum.min > Scalar(0))) {
            const double cond = double(s.spectrum.max / s.spectrum.min);
            throw NumericalError("information matrix of sensor " + std::to_string(i + 1) +
                                     " is not positive definite (condition estimate " +
                                     std::to_string(cond) + ")",
                                 static_cast<std::ptrdiff_t>(i), cond);
        }
        s.theta_ls = llt.solve(s.q);
        s.xi = prev.xi;
        s.H = prev.H;
        s.alpha = prev.alpha;
    });
    return next;
}

/// alpha = c * lambda_min(P_inv)^p.
template <std::floating_point Scalar>
Scalar alpha_schedule(Scalar lambda_min_p_inv, Scalar c = Scalar(1), Scalar p = Scalar(0.75))
{
    return c * std::pow(lambda_min_p_inv, p);
}

template <class Derived>
typename Derived::Scalar alpha_schedule(const Eigen::MatrixBase<Derived>& P_inv,
                                        typename Derived::Scalar c = 1,
                                        typename Derived::Scalar p = 0.75)
{
    return alpha_schedule(lambda_min(P_inv), c, p);
}

template <class Scalar>
struct ThetaHat {
    Vector<Scalar> value;
    Scalar bonus = 0;
    bool log_floored = false;
};

/**
 * theta_hat(l) = theta_ls(l) + sgn(theta_ls(l)) * sqrt(log lambda_max / lambda_min)
 * with sgn(0) = +1. While lambda_max <= e^{log_floor} the log is replaced by
 * `log_floor` so the bonus stays strictly positive.
 */
template <class Scalar>
ThetaHat<Scalar> theta_hat(const Vector<Scalar>& theta_ls, Spectrum<Scalar> spectrum,
                           Scalar log_floor = Scalar(1e-6))
{
    ThetaHat<Scalar> out;
    Scalar log_max = std::log(spectrum.max);
    if (!(log_max > log_floor)) {
        log_max = log_floor;
        out.log_floored = true;
    }
    out.bonus = std::sqrt(log_max / spectrum.min);
    out.value = theta_ls;
    for (Eigen::Index l = 0; l < theta_ls.size(); ++l) {
        out.value(l) += theta_ls(l) >= Scalar(0) ? out.bonus : -out.bonus;
    }
    return out;
}

template <class Derived>
ThetaHat<typename Derived::Scalar> theta_hat(const Vector<typename Derived::Scalar>& theta_ls,
                                             const Eigen::MatrixBase<Derived>& P_inv,
                                             typename Derived::Scalar log_floor = 1e-6)
{
    return theta_hat(theta_ls, extreme_eigenvalues(P_inv), log_floor);
}

/// beta^T P_inv beta - 2 q^T beta + alpha ||beta||_1 (the LASSO criterion up
/// to a beta-independent constant).
template <class Scalar>
Scalar plain_sparse_objective(const Matrix<Scalar>& P_inv, const Vector<Scalar>& q, Scalar alpha,
                              const Vector<Scalar>& beta)
{
    return beta.dot(P_inv * beta) - Scalar(2) * q.dot(beta) + alpha * beta.template lpNorm<1>();
}

template <class Scalar>
struct SparseOptions {
    Scalar alpha_c = 1;
    Scalar alpha_p = Scalar(0.75);
    Scalar log_floor = Scalar(1e-6);
    SolverOptions<Scalar> solver{};
};

/// Weighted problem for one sensor after its LS update:
/// Psi = P_inv, q, gamma_l = alpha / |theta_hat(l)|.
template <class Scalar>
QuadraticL1Problem<Scalar> assemble_problem(SensorState<Scalar>& s, const SparseOptions<Scalar>& opts)
{
    s.alpha = alpha_schedule(s.spectrum.min, opts.alpha_c, opts.alpha_p);
    const auto hat = theta_hat(s.theta_ls, s.spectrum, opts.log_floor);
    s.log_floored = hat.log_floored;

    QuadraticL1Problem<Scalar> p;
    p.Psi = s.P_inv;
    p.q = s.q;
    p.gamma = s.alpha * hat.value.cwiseAbs().cwiseInverse();
    return p;
}

/// Called once per sensor, in sensor order, after each sparse round.
template <class Scalar>
using SolveObserver = std::function<void(std::size_t sensor, const QuadraticL1Problem<Scalar>&,
                                         const SolveReport<Scalar>&)>;

/**
 * One round of the distributed sparse estimator: the LS round, then per
 * sensor alpha, theta_hat, the weighted L1 solve (warm-started at the
 * previous xi) and the zero set H = {l : xi(l) = 0}.
 *
 * Throws NumericalError naming the sensor and the sweep count when the
 * solver does not converge.
 */
template <class Scalar>
NetworkState<Scalar> sparse_round(const NetworkState<Scalar>& net, const NetworkGraph& g,
                                  const std::vector<Observation>& obs,
                                  const SparseOptions<Scalar>& opts, std::size_t workers = 1,
                                  const SolveObserver<Scalar>& observer = {})
{
    NetworkState<Scalar> next = dls_round(net, g, obs, workers);
    const std::size_t n = next.size();

    std::vector<QuadraticL1Problem<Scalar>> problems(observer ? n : 0);
    std::vector<SolveReport<Scalar>> reports(observer ? n : 0);

    parallel_for(n, workers, [&](std::size_t i) {
        auto& s = next.sensors[i];
        auto problem = assemble_problem(s, opts);
        auto report = coordinate_descent(problem, net.sensors[i].xi, opts.solver);
        if (!report.converged) {
            throw NumericalError("sparse solve of sensor " + std::to_string(i + 1) +
                                     " did not converge after " +
                                     std::to_string(report.iterations) + " sweeps (kkt residual " +
                                     std::to_string(double(report.kkt_residual)) + ")",
                                 static_cast<std::ptrdiff_t>(i));
        }
        s.xi = report.beta;
        s.H = zero_indices(s.xi);
        s.solver_iterations = report.iterations;
        if (observer) {
            problems[i] = std::move(problem);
            reports[i] = std::move(report);
        }
    });

    if (observer) {
        for (std::size_t i = 0; i < n; ++i) observer(i, problems[i], reports[i]);
    }
    return next;
}

} // namespace dsparse
