#include "dsparse/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace dsparse {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key)
{
    return base.empty() ? key : base + "." + key;
}

std::string index(const std::string& base, std::size_t k)
{
    return base + "[" + std::to_string(k) + "]";
}

void reject_unknown(const json& obj, const std::string& path, std::set<std::string> known)
{
    if (!obj.is_object()) throw ConfigError("expected an object", path.empty() ? "<root>" : path);
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) throw ConfigError("unknown key", join(path, key));
    }
}

double number(const json& v, const std::string& path)
{
    if (!v.is_number()) throw ConfigError("expected a number", path);
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("expected a finite number", path);
    return x;
}

std::size_t count(const json& v, const std::string& path)
{
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError("expected a nonnegative integer", path);
    }
    return v.get<std::size_t>();
}

VectorXd vector(const json& v, const std::string& path)
{
    if (!v.is_array() || v.empty()) throw ConfigError("expected a nonempty array", path);
    VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) out(static_cast<Eigen::Index>(k)) = number(v[k], index(path, k));
    return out;
}

template <class Fn>
void optional_field(const json& obj, const std::string& key, const std::string& path, Fn&& fn)
{
    if (auto it = obj.find(key); it != obj.end()) fn(*it, join(path, key));
}

GraphSpec graph_from_json(const json& j, const std::string& path)
{
    reject_unknown(j, path, {"n", "edges", "weights", "adjacency"});
    GraphSpec g;
    g.edges.clear();
    optional_field(j, "n", path, [&](const json& v, const std::string& p) { g.n = count(v, p); });
    optional_field(j, "edges", path, [&](const json& v, const std::string& p) {
        if (!v.is_array()) throw ConfigError("expected an array of [i, j] pairs", p);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto& e = v[k];
            const auto ep = index(p, k);
            if (!e.is_array() || e.size() != 2) throw ConfigError("expected [i, j]", ep);
            const auto a = count(e[0], index(ep, 0));
            const auto b = count(e[1], index(ep, 1));
            if (a < 1 || b < 1) throw ConfigError("node labels are 1-based", ep);
            g.edges.emplace_back(a - 1, b - 1);
        }
    });
    std::string weights = "metropolis";
    optional_field(j, "weights", path, [&](const json& v, const std::string& p) {
        if (!v.is_string()) throw ConfigError("expected \"metropolis\" or \"explicit\"", p);
        weights = v.get<std::string>();
        if (weights != "metropolis" && weights != "explicit") {
            throw ConfigError("expected \"metropolis\" or \"explicit\"", p);
        }
    });
    optional_field(j, "adjacency", path, [&](const json& v, const std::string& p) {
        if (!v.is_array() || v.size() != g.n) throw ConfigError("expected n rows", p);
        MatrixXd a(g.n, g.n);
        for (std::size_t r = 0; r < g.n; ++r) {
            const auto row = vector(v[r], index(p, r));
            if (row.size() != static_cast<Eigen::Index>(g.n)) throw ConfigError("expected n columns", index(p, r));
            a.row(static_cast<Eigen::Index>(r)) = row.transpose();
        }
        g.adjacency = std::move(a);
    });
    if (weights == "explicit" && !g.adjacency) {
        throw ConfigError("explicit weights need an adjacency matrix", join(path, "adjacency"));
    }
    if (weights == "metropolis" && g.adjacency) {
        throw ConfigError("adjacency given but weights is \"metropolis\"", join(path, "weights"));
    }
    return g;
}

ModelSpec model_from_json(const json& j, const std::string& path, const ModelSpec& defaults)
{
    reject_unknown(j, path, {"theta", "noise", "regressor", "replay"});
    ModelSpec m = defaults;
    optional_field(j, "theta", path, [&](const json& v, const std::string& p) { m.theta = vector(v, p); });
    optional_field(j, "noise", path, [&](const json& v, const std::string& p) {
        reject_unknown(v, p, {"kind", "variance"});
        optional_field(v, "kind", p, [&](const json& k, const std::string& kp) {
            const auto s = k.is_string() ? k.get<std::string>() : std::string{};
            if (s == "gaussian") m.noise.kind = NoiseKind::gaussian;
            else if (s == "uniform") m.noise.kind = NoiseKind::uniform;
            else throw ConfigError("expected \"gaussian\" or \"uniform\"", kp);
        });
        optional_field(v, "variance", p, [&](const json& x, const std::string& xp) {
            m.noise.variance = number(x, xp);
        });
    });
    optional_field(j, "regressor", path, [&](const json& v, const std::string& p) {
        reject_unknown(v, p, {"kind", "A_scale", "eps_variance", "variance"});
        optional_field(v, "kind", p, [&](const json& k, const std::string& kp) {
            const auto s = k.is_string() ? k.get<std::string>() : std::string{};
            if (s == "state_space") m.regressor.kind = RegressorKind::state_space;
            else if (s == "iid_gaussian") m.regressor.kind = RegressorKind::iid_gaussian;
            else throw ConfigError("expected \"state_space\" or \"iid_gaussian\"", kp);
        });
        optional_field(v, "A_scale", p, [&](const json& x, const std::string& xp) { m.regressor.a_scale = number(x, xp); });
        optional_field(v, "eps_variance", p, [&](const json& x, const std::string& xp) { m.regressor.eps_variance = number(x, xp); });
        optional_field(v, "variance", p, [&](const json& x, const std::string& xp) { m.regressor.variance = number(x, xp); });
    });
    optional_field(j, "replay", path, [&](const json& v, const std::string& p) {
        if (!v.is_string()) throw ConfigError("expected a file path", p);
        m.replay = v.get<std::string>();
    });
    return m;
}

EstimatorSpec estimator_from_json(const json& j, const std::string& path, const EstimatorSpec& defaults)
{
    reject_unknown(j, path, {"P0_scale", "theta0", "alpha", "log_floor", "solver"});
    EstimatorSpec e = defaults;
    optional_field(j, "P0_scale", path, [&](const json& v, const std::string& p) { e.P0_scale = number(v, p); });
    optional_field(j, "theta0", path, [&](const json& v, const std::string& p) { e.theta0 = vector(v, p); });
    optional_field(j, "log_floor", path, [&](const json& v, const std::string& p) { e.log_floor = number(v, p); });
    optional_field(j, "alpha", path, [&](const json& v, const std::string& p) {
        reject_unknown(v, p, {"c", "p"});
        optional_field(v, "c", p, [&](const json& x, const std::string& xp) { e.alpha_c = number(x, xp); });
        optional_field(v, "p", p, [&](const json& x, const std::string& xp) { e.alpha_p = number(x, xp); });
    });
    optional_field(j, "solver", path, [&](const json& v, const std::string& p) {
        reject_unknown(v, p, {"tol", "max_iters", "kkt_tol"});
        optional_field(v, "tol", p, [&](const json& x, const std::string& xp) { e.solver_tol = number(x, xp); });
        optional_field(v, "max_iters", p, [&](const json& x, const std::string& xp) { e.solver_max_iters = count(x, xp); });
        optional_field(v, "kkt_tol", p, [&](const json& x, const std::string& xp) { e.solver_kkt_tol = number(x, xp); });
    });
    return e;
}

json vector_json(const VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

} // namespace

Mode parse_mode(const std::string& name)
{
    if (name == "distributed") return Mode::distributed;
    if (name == "non_cooperative") return Mode::non_cooperative;
    if (name == "ls_only") return Mode::ls_only;
    throw ConfigError("expected distributed, non_cooperative or ls_only", "mode");
}

std::string to_string(Mode mode)
{
    switch (mode) {
    case Mode::distributed: return "distributed";
    case Mode::non_cooperative: return "non_cooperative";
    case Mode::ls_only: return "ls_only";
    }
    return "distributed";
}

ExperimentConfig default_config()
{
    ExperimentConfig cfg;
    cfg.graph.n = 6;
    for (std::size_t i = 0; i < 6; ++i) cfg.graph.edges.emplace_back(i, (i + 1) % 6);
    cfg.model.theta.resize(5);
    cfg.model.theta << 0.8, 1.6, 0.0, 0.0, 0.0;
    cfg.model.noise = {NoiseKind::gaussian, 0.1};
    cfg.model.regressor = {RegressorKind::state_space, 1.1, 0.2, 1.0};
    cfg.estimator.theta0 = VectorXd::Ones(5);
    return cfg;
}

ExperimentConfig config_from_json(const json& j)
{
    reject_unknown(j, "", {"graph", "model", "estimator", "horizon", "repeats", "seed", "mode"});
    const ExperimentConfig defaults = default_config();
    ExperimentConfig cfg = defaults;
    optional_field(j, "graph", "", [&](const json& v, const std::string& p) { cfg.graph = graph_from_json(v, p); });
    optional_field(j, "model", "", [&](const json& v, const std::string& p) { cfg.model = model_from_json(v, p, defaults.model); });
    optional_field(j, "estimator", "", [&](const json& v, const std::string& p) {
        cfg.estimator = estimator_from_json(v, p, defaults.estimator);
    });
    optional_field(j, "horizon", "", [&](const json& v, const std::string& p) { cfg.horizon = count(v, p); });
    optional_field(j, "repeats", "", [&](const json& v, const std::string& p) { cfg.repeats = count(v, p); });
    optional_field(j, "seed", "", [&](const json& v, const std::string& p) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            throw ConfigError("expected a nonnegative integer", p);
        }
        cfg.seed = v.get<std::uint64_t>();
    });
    optional_field(j, "mode", "", [&](const json& v, const std::string& p) {
        if (!v.is_string()) throw ConfigError("expected a string", p);
        cfg.mode = parse_mode(v.get<std::string>());
    });
    if (j.contains("model") && j["model"].contains("theta") && !(j.contains("estimator") && j["estimator"].contains("theta0"))) {
        cfg.estimator.theta0 = VectorXd::Ones(cfg.model.theta.size());
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string(), "--config");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what(), "--config");
    }
    if (j.is_object() && j.contains("model") && j["model"].is_object() && j["model"].contains("replay") &&
        j["model"]["replay"].is_string()) {
        std::filesystem::path replay = j["model"]["replay"].get<std::string>();
        if (replay.is_relative()) j["model"]["replay"] = (path.parent_path() / replay).string();
    }
    return config_from_json(j);
}

json to_json(const ExperimentConfig& cfg)
{
    json graph = {{"n", cfg.graph.n}};
    json edges = json::array();
    for (const auto& [a, b] : cfg.graph.edges) edges.push_back({a + 1, b + 1});
    graph["edges"] = edges;
    if (cfg.graph.adjacency) {
        graph["weights"] = "explicit";
        json rows = json::array();
        for (Eigen::Index r = 0; r < cfg.graph.adjacency->rows(); ++r) {
            rows.push_back(vector_json(cfg.graph.adjacency->row(r).transpose()));
        }
        graph["adjacency"] = rows;
    } else {
        graph["weights"] = "metropolis";
    }

    json model = {
        {"theta", vector_json(cfg.model.theta)},
        {"noise",
         {{"kind", cfg.model.noise.kind == NoiseKind::gaussian ? "gaussian" : "uniform"},
          {"variance", cfg.model.noise.variance}}},
    };
    if (cfg.model.regressor.kind == RegressorKind::state_space) {
        model["regressor"] = {{"kind", "state_space"},
                              {"A_scale", cfg.model.regressor.a_scale},
                              {"eps_variance", cfg.model.regressor.eps_variance}};
    } else {
        model["regressor"] = {{"kind", "iid_gaussian"}, {"variance", cfg.model.regressor.variance}};
    }
    if (cfg.model.replay) model["replay"] = cfg.model.replay->string();

    const auto& e = cfg.estimator;
    json estimator = {
        {"P0_scale", e.P0_scale},
        {"theta0", vector_json(e.theta0)},
        {"alpha", {{"c", e.alpha_c}, {"p", e.alpha_p}}},
        {"log_floor", e.log_floor},
        {"solver", {{"tol", e.solver_tol}, {"max_iters", e.solver_max_iters}, {"kkt_tol", e.solver_kkt_tol}}},
    };

    return json{{"graph", graph},     {"model", model},
                {"estimator", estimator}, {"horizon", cfg.horizon},
                {"repeats", cfg.repeats}, {"seed", cfg.seed},
                {"mode", to_string(cfg.mode)}};
}

void validate(const ExperimentConfig& cfg)
{
    if (cfg.horizon < 1) throw ConfigError("must be at least 1", "horizon");
    if (cfg.repeats < 1) throw ConfigError("must be at least 1", "repeats");
    if (cfg.graph.n < 1) throw ConfigError("must be at least 1", "graph.n");
    const auto m = cfg.model.theta.size();
    if (m < 1) throw ConfigError("must not be empty", "model.theta");
    if (cfg.estimator.theta0.size() != m) {
        throw ConfigError("length must match model.theta", "estimator.theta0");
    }
    if (!(cfg.estimator.P0_scale > 0.0)) throw ConfigError("must be positive", "estimator.P0_scale");
    if (cfg.estimator.alpha_c < 0.0) throw ConfigError("must be nonnegative", "estimator.alpha.c");
    if (!(cfg.estimator.log_floor > 0.0)) throw ConfigError("must be positive", "estimator.log_floor");
    if (!(cfg.estimator.solver_tol > 0.0)) throw ConfigError("must be positive", "estimator.solver.tol");
    if (cfg.estimator.solver_max_iters < 1) throw ConfigError("must be at least 1", "estimator.solver.max_iters");
    if (cfg.model.noise.variance < 0.0) throw ConfigError("must be nonnegative", "model.noise.variance");
    if (cfg.model.regressor.eps_variance < 0.0) {
        throw ConfigError("must be nonnegative", "model.regressor.eps_variance");
    }
    if (cfg.model.regressor.variance < 0.0) throw ConfigError("must be nonnegative", "model.regressor.variance");
    build_graph(cfg.graph);
}

NetworkGraph build_graph(const GraphSpec& spec)
{
    auto g = spec.adjacency ? NetworkGraph(spec.n, spec.edges, *spec.adjacency)
                            : metropolis_weights(spec.edges, spec.n);
    if (!is_connected(g)) {
        throw ConfigError("communication graph must be connected", "graph.edges");
    }
    return g;
}

std::vector<RegressorGenerator> build_generators(const ModelSpec& spec, std::size_t n)
{
    const auto m = static_cast<std::size_t>(spec.theta.size());
    std::vector<RegressorGenerator> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (spec.regressor.kind == RegressorKind::state_space) {
            out.emplace_back(single_coordinate_regressor(i, m, spec.regressor.a_scale,
                                                         spec.regressor.eps_variance));
        } else {
            out.emplace_back(IidGaussianRegressor{m, spec.regressor.variance});
        }
    }
    return out;
}

} // namespace dsparse
