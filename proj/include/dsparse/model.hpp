#pragma once

#include "dsparse/rng.hpp"
#include "dsparse/types.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

namespace dsparse {

/// Unknown parameter together with its zero pattern H* (0-based indices).
struct TrueParameter {
    VectorXd theta;
    std::size_t d = 0;
    std::vector<std::size_t> zero_set;

    explicit TrueParameter(VectorXd value);
    std::size_t dim() const noexcept { return static_cast<std::size_t>(theta.size()); }
};

/// x <- A x + B eps, phi = C x, eps ~ N(0, eps_variance).
struct StateSpaceRegressor {
    MatrixXd A;
    VectorXd B;
    MatrixXd C;
    VectorXd x;
    double eps_variance = 0.0;
};

/// phi ~ N(0, variance * I), independent across rounds.
struct IidGaussianRegressor {
    std::size_t m = 0;
    double variance = 1.0;
};

using RegressorGenerator = std::variant<StateSpaceRegressor, IidGaussianRegressor>;

VectorXd step_regressor(StateSpaceRegressor& r, Substream& rng);
VectorXd step_regressor(IidGaussianRegressor& r, Substream& rng);
VectorXd step_regressor(RegressorGenerator& r, Substream& rng);

/**
 * Single-coordinate excitation used in the reference simulation: A = a I,
 * B = e_j, C = e_j e_j^T, x_0 = ones, with j = sensor mod m (0-based).
 * Each sensor only ever excites coordinate j.
 */
StateSpaceRegressor single_coordinate_regressor(std::size_t sensor, std::size_t m,
                                                double a_scale, double eps_variance);

enum class NoiseKind { gaussian, uniform };

/// Zero-mean observation noise. `uniform` is U(-h, h) with h = sqrt(3 variance).
struct NoiseModel {
    NoiseKind kind = NoiseKind::gaussian;
    double variance = 0.1;

    double draw(Substream& rng) const;
};

/// y = phi^T theta + w.
double observe(const TrueParameter& theta, const VectorXd& phi, const NoiseModel& noise,
               Substream& rng);

struct Observation {
    VectorXd phi;
    double y = 0.0;
};

/// Rows (t, i, phi(1..m), y) with 0-based t and 1-based i.
struct ReplayTable {
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<std::vector<Observation>> rounds; // rounds[t][i]
};

ReplayTable read_replay_csv(const std::filesystem::path& path);
ReplayTable read_replay_csv(std::istream& in);
void write_replay_csv(std::ostream& out, const ReplayTable& table);

/**
 * Seeded per-sensor source of (phi_{t,i}, y_{t+1,i}).
 *
 * Each sensor draws from its own regressor and observation substreams, so
 * the sequence of one sensor does not depend on the others. Streams are
 * advanced one round at a time by a single owner.
 */
class ObservationStream {
public:
    ObservationStream(TrueParameter theta, NoiseModel noise,
                      std::vector<RegressorGenerator> generators, std::uint64_t run_seed);
    ObservationStream(TrueParameter theta, ReplayTable replay);

    std::size_t sensors() const noexcept { return n_; }
    std::size_t dim() const noexcept { return theta_.dim(); }
    std::size_t round() const noexcept { return t_; }
    const TrueParameter& truth() const noexcept { return theta_; }

    /// (phi_{t,i}, y_{t+1,i}) for every sensor at the current round t, then t += 1.
    std::vector<Observation> next_round();

private:
    TrueParameter theta_;
    NoiseModel noise_;
    std::size_t n_;
    std::size_t t_ = 0;
    std::vector<RegressorGenerator> generators_;
    std::vector<Substream> regressor_rng_;
    std::vector<Substream> noise_rng_;
    std::optional<ReplayTable> replay_;
};

} // namespace dsparse
