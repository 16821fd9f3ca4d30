#pragma once

#include "dsparse/estimator.hpp"
#include "dsparse/model.hpp"
#include "dsparse/types.hpp"

#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

namespace dsparse {

/**
 * Running excitation quantities of a network.
 *
 *   r_t          = max_i lambda_max(P0_i^{-1}) + sum_i sum_{k<=t} ||phi_{k,i}||^2
 *   window Gram  = sum_j P0_j^{-1} + sum_j sum_{k <= t - D + 1} phi_{k,j} phi_{k,j}^T
 *
 * D is the graph diameter, taken as 1 for a single sensor. Regressors are
 * held back D - 1 rounds before entering the window Gram. Per-sensor "solo"
 * Grams P0^{-1} + sum_k phi_{k,i} phi_{k,i}^T are tracked alongside to show
 * what each sensor could identify on its own.
 */
class ExcitationLedger {
public:
    ExcitationLedger(std::size_t n, const MatrixXd& P0_inv, std::size_t diameter);

    void update(const std::vector<Observation>& obs);

    double r() const noexcept { return r_; }
    double lambda_n_t_min() const noexcept { return lambda_window_; }
    const MatrixXd& window_gram() const noexcept { return window_; }
    std::size_t diameter() const noexcept { return diameter_; }
    std::size_t rounds() const noexcept { return rounds_; }
    double solo_lambda_min(std::size_t i) const { return solo_lambda_[i]; }
    const std::vector<double>& solo_lambda_min() const noexcept { return solo_lambda_; }

private:
    std::size_t diameter_;
    std::size_t rounds_ = 0;
    double r_;
    MatrixXd window_;
    double lambda_window_;
    std::deque<MatrixXd> pending_;
    std::vector<MatrixXd> solo_;
    std::vector<double> solo_lambda_;
};

/// sum_i (phi_{t,i}^T (xi_{t,i} - theta))^2 using the estimates held before
/// y_{t+1} is seen.
double regret_increment(const NetworkState<double>& net_prev, const std::vector<Observation>& obs,
                        const VectorXd& theta);

/// (r / lambda) sqrt(log r / lambda). +inf when lambda <= 0 or r <= 1.
double coop_ratio(double r, double lambda_n_t_min);

inline double coop_ratio(const ExcitationLedger& ledger)
{
    return coop_ratio(ledger.r(), ledger.lambda_n_t_min());
}

/// alpha / lambda_min + sqrt(log r / lambda_min), constant factor omitted.
/// log r is clamped at 0.
double theorem1_bound(double lambda_min_p_inv, double alpha, double r);

/// H_{t,i} == H* for each sensor.
std::vector<bool> zero_set_agreement(const NetworkState<double>& net, const TrueParameter& theta);

/// max_i phi_i^T P_i phi_i, i.e. lambda_max of the block-diagonal
/// Phi^T P Phi, with P_i = P_inv_i^{-1} from `net`.
double max_phi_p_phi(const NetworkState<double>& net, const std::vector<Observation>& obs);

/// One row of a run. Cumulative quantities (regret, r, lambda) cover the
/// rounds 0..t-1 already processed; estimates are those after t rounds.
struct RoundRecord {
    std::size_t t = 0;
    double regret = 0.0;
    double r = 0.0;
    double lambda_n_t_min = 0.0;
    double coop_ratio = 0.0;
    double max_phi_p_phi = 0.0; // over the round that produced this row
    std::vector<double> xi_error;
    std::vector<double> ls_error;
    std::vector<double> bound;
    std::vector<double> alpha;
    std::vector<bool> zero_set_ok;
    std::vector<double> solo_lambda_min;
};

struct RunRecord {
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    std::vector<RoundRecord> rows; // rows[t], t = 0..T
    std::vector<VectorXd> final_xi; // per sensor, after the last round

    /// Per sensor, the first t with H_{t',i} = H* for every t' in [t, T];
    /// -1 if the last row disagrees.
    std::vector<long> set_convergence_time() const;
};

} // namespace dsparse
