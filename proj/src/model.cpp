#include "dsparse/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace dsparse {

TrueParameter::TrueParameter(VectorXd value) : theta(std::move(value))
{
    for (Eigen::Index l = 0; l < theta.size(); ++l) {
        if (theta(l) == 0.0) {
            zero_set.push_back(static_cast<std::size_t>(l));
        } else {
            ++d;
        }
    }
}

VectorXd step_regressor(StateSpaceRegressor& r, Substream& rng)
{
    const double eps = r.eps_variance > 0.0 ? rng.normal(r.eps_variance) : 0.0;
    r.x = r.A * r.x + r.B * eps;
    return r.C * r.x;
}

VectorXd step_regressor(IidGaussianRegressor& r, Substream& rng)
{
    VectorXd phi(static_cast<Eigen::Index>(r.m));
    for (Eigen::Index l = 0; l < phi.size(); ++l) phi(l) = rng.normal(r.variance);
    return phi;
}

VectorXd step_regressor(RegressorGenerator& r, Substream& rng)
{
    return std::visit([&rng](auto& gen) { return step_regressor(gen, rng); }, r);
}

StateSpaceRegressor single_coordinate_regressor(std::size_t sensor, std::size_t m,
                                                double a_scale, double eps_variance)
{
    const auto dim = static_cast<Eigen::Index>(m);
    const auto j = static_cast<Eigen::Index>(sensor % m);
    StateSpaceRegressor r;
    r.A = a_scale * MatrixXd::Identity(dim, dim);
    r.B = VectorXd::Unit(dim, j);
    r.C = MatrixXd::Zero(dim, dim);
    r.C(j, j) = 1.0;
    r.x = VectorXd::Ones(dim);
    r.eps_variance = eps_variance;
    return r;
}

double NoiseModel::draw(Substream& rng) const
{
    if (variance <= 0.0) return 0.0;
    switch (kind) {
    case NoiseKind::gaussian:
        return rng.normal(variance);
    case NoiseKind::uniform: {
        const double half = std::sqrt(3.0 * variance);
        return half * (2.0 * rng.uniform() - 1.0);
    }
    }
    return 0.0;
}

double observe(const TrueParameter& theta, const VectorXd& phi, const NoiseModel& noise,
               Substream& rng)
{
    if (phi.size() != theta.theta.size()) {
        throw ConfigError("regressor dimension does not match theta");
    }
    return phi.dot(theta.theta) + noise.draw(rng);
}

ReplayTable read_replay_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open replay file " + path.string(), "model.replay");
    return read_replay_csv(in);
}

ReplayTable read_replay_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty replay file", "model.replay");

    std::size_t columns = 0;
    {
        std::stringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) ++columns;
    }
    if (columns < 4) throw ConfigError("replay header needs t,i,phi_1..phi_m,y", "model.replay");
    const std::size_t m = columns - 3;

    std::map<std::size_t, std::map<std::size_t, Observation>> rows;
    std::size_t n = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
        if (values.size() != columns) {
            throw ConfigError("wrong column count on line " + std::to_string(lineno),
                              "model.replay");
        }
        const auto t = static_cast<std::size_t>(values[0]);
        const auto i = static_cast<std::size_t>(values[1]);
        if (i < 1) throw ConfigError("sensor labels are 1-based", "model.replay");
        Observation obs;
        obs.phi = Eigen::Map<const VectorXd>(values.data() + 2, static_cast<Eigen::Index>(m));
        obs.y = values.back();
        rows[t][i - 1] = std::move(obs);
        n = std::max(n, i);
    }

    ReplayTable table;
    table.n = n;
    table.m = m;
    std::size_t expected_t = 0;
    for (auto& [t, sensors] : rows) {
        if (t != expected_t++ || sensors.size() != n) {
            throw ConfigError("replay must list every sensor for rounds 0..T-1", "model.replay");
        }
        std::vector<Observation> round;
        for (auto& [i, obs] : sensors) round.push_back(std::move(obs));
        table.rounds.push_back(std::move(round));
    }
    return table;
}

void write_replay_csv(std::ostream& out, const ReplayTable& table)
{
    out << "t,i";
    for (std::size_t l = 1; l <= table.m; ++l) out << ",phi_" << l;
    out << ",y\n";
    out << std::setprecision(17);
    for (std::size_t t = 0; t < table.rounds.size(); ++t) {
        for (std::size_t i = 0; i < table.rounds[t].size(); ++i) {
            const auto& obs = table.rounds[t][i];
            out << t << ',' << (i + 1);
            for (Eigen::Index l = 0; l < obs.phi.size(); ++l) out << ',' << obs.phi(l);
            out << ',' << obs.y << '\n';
        }
    }
}

ObservationStream::ObservationStream(TrueParameter theta, NoiseModel noise,
                                     std::vector<RegressorGenerator> generators,
                                     std::uint64_t run_seed)
    : theta_(std::move(theta)), noise_(noise), n_(generators.size()),
      generators_(std::move(generators))
{
    for (std::size_t i = 0; i < n_; ++i) {
        regressor_rng_.emplace_back(run_seed, i, Purpose::regressor);
        noise_rng_.emplace_back(run_seed, i, Purpose::observation);
    }
}

ObservationStream::ObservationStream(TrueParameter theta, ReplayTable replay)
    : theta_(std::move(theta)), n_(replay.n), replay_(std::move(replay))
{
    if (replay_->m != theta_.dim()) {
        throw ConfigError("replay regressor width does not match theta", "model.replay");
    }
}

std::vector<Observation> ObservationStream::next_round()
{
    std::vector<Observation> out;
    out.reserve(n_);
    if (replay_) {
        if (t_ >= replay_->rounds.size()) {
            throw ConfigError("replay file shorter than the horizon", "model.replay");
        }
        out = replay_->rounds[t_];
    } else {
        for (std::size_t i = 0; i < n_; ++i) {
            Observation obs;
            obs.phi = step_regressor(generators_[i], regressor_rng_[i]);
            obs.y = observe(theta_, obs.phi, noise_, noise_rng_[i]);
            out.push_back(std::move(obs));
        }
    }
    ++t_;
    return out;
}

} // namespace dsparse
