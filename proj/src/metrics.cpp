#include "dsparse/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace dsparse {

ExcitationLedger::ExcitationLedger(std::size_t n, const MatrixXd& P0_inv, std::size_t diameter)
    : diameter_(std::max<std::size_t>(diameter, 1)),
      r_(lambda_max(P0_inv)),
      window_(static_cast<double>(n) * P0_inv),
      lambda_window_(lambda_min(window_)),
      solo_(n, P0_inv),
      solo_lambda_(n, lambda_min(P0_inv))
{
}

void ExcitationLedger::update(const std::vector<Observation>& obs)
{
    const auto m = window_.rows();
    MatrixXd round_gram = MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& phi = obs[i].phi;
        r_ += phi.squaredNorm();
        const MatrixXd outer = phi * phi.transpose();
        round_gram += outer;
        solo_[i] += outer;
        solo_lambda_[i] = lambda_min(solo_[i]);
    }
    pending_.push_back(std::move(round_gram));
    while (pending_.size() > diameter_ - 1) {
        window_ += pending_.front();
        pending_.pop_front();
    }
    lambda_window_ = lambda_min(window_);
    ++rounds_;
}

double regret_increment(const NetworkState<double>& net_prev, const std::vector<Observation>& obs,
                        const VectorXd& theta)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double e = obs[i].phi.dot(net_prev.sensors[i].xi - theta);
        sum += e * e;
    }
    return sum;
}

double coop_ratio(double r, double lambda_n_t_min)
{
    if (!(lambda_n_t_min > 0.0) || !(r > 1.0)) return std::numeric_limits<double>::infinity();
    return (r / lambda_n_t_min) * std::sqrt(std::log(r) / lambda_n_t_min);
}

double theorem1_bound(double lambda_min_p_inv, double alpha, double r)
{
    const double log_r = std::max(std::log(r), 0.0);
    return alpha / lambda_min_p_inv + std::sqrt(log_r / lambda_min_p_inv);
}

std::vector<bool> zero_set_agreement(const NetworkState<double>& net, const TrueParameter& theta)
{
    std::vector<bool> out;
    out.reserve(net.size());
    for (const auto& s : net.sensors) out.push_back(s.H == theta.zero_set);
    return out;
}

double max_phi_p_phi(const NetworkState<double>& net, const std::vector<Observation>& obs)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        Eigen::LLT<MatrixXd> llt(net.sensors[i].P_inv);
        worst = std::max(worst, obs[i].phi.dot(llt.solve(obs[i].phi)));
    }
    return worst;
}

std::vector<long> RunRecord::set_convergence_time() const
{
    if (rows.empty()) return {};
    const std::size_t n = rows.back().zero_set_ok.size();
    std::vector<long> out(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        long first = -1;
        for (std::size_t k = rows.size(); k-- > 0;) {
            if (!rows[k].zero_set_ok[i]) break;
            first = static_cast<long>(rows[k].t);
        }
        out[i] = first;
    }
    return out;
}

} // namespace dsparse
