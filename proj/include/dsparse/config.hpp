#pragma once

#include "dsparse/graph.hpp"
#include "dsparse/model.hpp"
#include "dsparse/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace dsparse {

enum class Mode { distributed, non_cooperative, ls_only };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct GraphSpec {
    std::size_t n = 6;
    std::vector<Edge> edges; // 0-based
    std::optional<MatrixXd> adjacency; // explicit weights instead of Metropolis
};

enum class RegressorKind { state_space, iid_gaussian };

struct RegressorSpec {
    RegressorKind kind = RegressorKind::state_space;
    double a_scale = 1.1;      // state_space
    double eps_variance = 0.2; // state_space
    double variance = 1.0;     // iid_gaussian
};

struct ModelSpec {
    VectorXd theta;
    NoiseModel noise;
    RegressorSpec regressor;
    std::optional<std::filesystem::path> replay;
};

struct EstimatorSpec {
    double P0_scale = 1.0;
    VectorXd theta0;
    double alpha_c = 1.0;
    double alpha_p = 0.75;
    double log_floor = 1e-6;
    double solver_tol = 1e-10;
    std::size_t solver_max_iters = 100000;
    double solver_kkt_tol = 1e-8;
};

struct ExperimentConfig {
    GraphSpec graph;
    ModelSpec model;
    EstimatorSpec estimator;
    std::size_t horizon = 200;
    std::size_t repeats = 100;
    std::uint64_t seed = 1;
    Mode mode = Mode::distributed;
};

/// Six sensors on a ring, m = 5, theta = [0.8, 1.6, 0, 0, 0], N(0, 0.1)
/// observation noise, single-coordinate state-space regressors with
/// A = 1.1 I and N(0, 0.2) input noise, theta0 = ones, P0 = I,
/// alpha = lambda_min^0.75, T = 200, S = 100.
ExperimentConfig default_config();

/// Throws ConfigError with a field path ("model.theta[2]") on bad input.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Reads a config file; a relative `model.replay` path is resolved against
/// the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& cfg);

/// Cross-field checks (dimensions, positivity, connectivity).
void validate(const ExperimentConfig& cfg);

/// Metropolis weights unless an explicit adjacency is given. Throws
/// ConfigError if the graph is disconnected.
NetworkGraph build_graph(const GraphSpec& spec);

std::vector<RegressorGenerator> build_generators(const ModelSpec& spec, std::size_t n);

} // namespace dsparse
