#include "dsparse/experiment.hpp"

#include "dsparse/estimator.hpp"
#include "dsparse/parallel.hpp"
#include "dsparse/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <string>

namespace dsparse {

namespace {

std::string fmt(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string(), "--out");
    return out;
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;
};

// Sample standard deviation; 0 for a single value.
MeanStd mean_std(const std::vector<double>& xs)
{
    MeanStd out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

std::vector<double> pooled(const std::vector<RunRecord>& runs, std::size_t t,
                           std::vector<double> RoundRecord::*field)
{
    std::vector<double> xs;
    for (const auto& run : runs) {
        const auto& v = run.rows[t].*field;
        xs.insert(xs.end(), v.begin(), v.end());
    }
    return xs;
}

ObservationStream make_stream(const ExperimentConfig& cfg, std::uint64_t seed)
{
    TrueParameter truth(cfg.model.theta);
    if (cfg.model.replay) {
        return ObservationStream(std::move(truth), read_replay_csv(*cfg.model.replay));
    }
    return ObservationStream(std::move(truth), cfg.model.noise,
                             build_generators(cfg.model, cfg.graph.n), seed);
}

RoundRecord make_row(std::size_t t, double regret, const ExcitationLedger& ledger,
                     const NetworkState<double>& net, const TrueParameter& truth, double phi_p_phi)
{
    RoundRecord row;
    row.t = t;
    row.regret = regret;
    row.r = ledger.r();
    row.lambda_n_t_min = ledger.lambda_n_t_min();
    row.coop_ratio = coop_ratio(ledger);
    row.max_phi_p_phi = phi_p_phi;
    row.zero_set_ok = zero_set_agreement(net, truth);
    row.solo_lambda_min = ledger.solo_lambda_min();
    for (const auto& s : net.sensors) {
        row.xi_error.push_back((s.xi - truth.theta).norm());
        row.ls_error.push_back((s.theta_ls - truth.theta).norm());
        row.bound.push_back(theorem1_bound(s.spectrum.min, s.alpha, ledger.r()));
        row.alpha.push_back(s.alpha);
    }
    return row;
}

} // namespace

std::uint64_t repeat_seed(const ExperimentConfig& cfg, std::size_t s)
{
    return hash64(cfg.seed, s);
}

RunRecord simulate_run(const ExperimentConfig& cfg, std::size_t repeat, std::size_t sensor_workers,
                       const DumpOptions* dumps)
{
    const NetworkGraph graph = build_graph(cfg.graph);
    const std::size_t D = diameter(graph);
    const NetworkGraph network =
        cfg.mode == Mode::non_cooperative ? NetworkGraph::isolated(graph.size()) : graph;
    const std::size_t n = graph.size();
    const auto m = cfg.model.theta.size();

    RunRecord record;
    record.repeat = repeat;
    record.seed = repeat_seed(cfg, repeat);

    ObservationStream stream = make_stream(cfg, record.seed);
    if (stream.sensors() != n) {
        throw ConfigError("replay sensor count does not match graph.n", "model.replay");
    }
    const TrueParameter& truth = stream.truth();

    const MatrixXd P0 = cfg.estimator.P0_scale * MatrixXd::Identity(m, m);
    NetworkState<double> net = init_state<double>(n, P0, cfg.estimator.theta0);
    ExcitationLedger ledger(n, net.sensors.front().P_inv, D);

    SparseOptions<double> opts;
    opts.alpha_c = cfg.mode == Mode::ls_only ? 0.0 : cfg.estimator.alpha_c;
    opts.alpha_p = cfg.estimator.alpha_p;
    opts.log_floor = cfg.estimator.log_floor;
    opts.solver.tol = cfg.estimator.solver_tol;
    opts.solver.max_iters = cfg.estimator.solver_max_iters;
    opts.solver.kkt_tol = cfg.estimator.solver_kkt_tol;

    std::unique_ptr<std::ofstream> states, solver, observations;
    ReplayTable replay;
    if (dumps) {
        const auto tag = std::to_string(repeat) + ".csv";
        if (dumps->states) {
            states = std::make_unique<std::ofstream>(open_out(dumps->dir / ("states_" + tag)));
            write_state_header(*states, static_cast<std::size_t>(m));
            write_state_rows(*states, net);
        }
        if (dumps->solver) {
            solver = std::make_unique<std::ofstream>(open_out(dumps->dir / ("solver_" + tag)));
            *solver << "t,i";
            for (Eigen::Index r = 1; r <= m; ++r) {
                for (Eigen::Index c = 1; c <= m; ++c) *solver << ",Psi_" << r << '_' << c;
            }
            for (const char* name : {"q", "gamma", "beta"}) {
                for (Eigen::Index l = 1; l <= m; ++l) *solver << ',' << name << '_' << l;
            }
            *solver << ",kkt_residual,iterations\n";
        }
        if (dumps->observations) {
            observations = std::make_unique<std::ofstream>(open_out(dumps->dir / ("observations_" + tag)));
            replay.n = n;
            replay.m = static_cast<std::size_t>(m);
        }
    }

    double regret = 0.0;
    record.rows.reserve(cfg.horizon + 1);
    record.rows.push_back(make_row(0, regret, ledger, net, truth, 0.0));
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
        auto obs = stream.next_round();
        regret += regret_increment(net, obs, truth.theta);
        const double phi_p_phi = max_phi_p_phi(net, obs);

        SolveObserver<double> observer;
        if (solver) {
            observer = [&](std::size_t i, const QuadraticL1Problem<double>& p, const SolveReport<double>& rep) {
                auto& out = *solver;
                out << (t + 1) << ',' << (i + 1);
                for (Eigen::Index r = 0; r < m; ++r) {
                    for (Eigen::Index c = 0; c < m; ++c) out << ',' << fmt(p.Psi(r, c));
                }
                for (const VectorXd* v : {&p.q, &p.gamma, &rep.beta}) {
                    for (Eigen::Index l = 0; l < m; ++l) out << ',' << fmt((*v)(l));
                }
                out << ',' << fmt(rep.kkt_residual) << ',' << rep.iterations << '\n';
            };
        }
        net = sparse_round(net, network, obs, opts, sensor_workers, observer);
        ledger.update(obs);
        if (observations) replay.rounds.push_back(obs);
        if (states) write_state_rows(*states, net);
        record.rows.push_back(make_row(t + 1, regret, ledger, net, truth, phi_p_phi));
    }
    if (observations) write_replay_csv(*observations, replay);
    for (const auto& s : net.sensors) record.final_xi.push_back(s.xi);
    return record;
}

std::vector<RunRecord> run_repeats(const ExperimentConfig& cfg, std::size_t workers,
                                   const DumpOptions* dumps)
{
    validate(cfg);
    std::vector<RunRecord> runs(cfg.repeats);
    const std::size_t sensor_workers = cfg.repeats == 1 ? workers : 1;
    parallel_for(cfg.repeats, workers, [&](std::size_t s) {
        runs[s] = simulate_run(cfg, s, sensor_workers, dumps);
    });
    return runs;
}

Comparison compare_modes(const ExperimentConfig& cfg, std::size_t workers)
{
    ExperimentConfig dist = cfg;
    dist.mode = Mode::distributed;
    ExperimentConfig solo = cfg;
    solo.mode = Mode::non_cooperative;
    return {run_repeats(dist, workers), run_repeats(solo, workers)};
}

double mean_error(const std::vector<RunRecord>& runs, std::size_t t)
{
    return mean_std(pooled(runs, t, &RoundRecord::xi_error)).mean;
}

void write_run_csv(std::ostream& out, const RunRecord& run)
{
    const std::size_t n = run.rows.empty() ? 0 : run.rows.front().xi_error.size();
    out << "t,R_t,r_t,lambda_n_t_min,coop_ratio";
    for (const char* name : {"xi_err", "ls_err", "bound", "alpha", "zero_set_ok"}) {
        for (std::size_t i = 1; i <= n; ++i) out << ',' << name << '_' << i;
    }
    out << ",max_phi_P_phi\n";
    for (const auto& row : run.rows) {
        out << row.t << ',' << fmt(row.regret) << ',' << fmt(row.r) << ',' << fmt(row.lambda_n_t_min)
            << ',' << fmt(row.coop_ratio);
        for (const auto* v : {&row.xi_error, &row.ls_error, &row.bound, &row.alpha}) {
            for (double x : *v) out << ',' << fmt(x);
        }
        for (bool ok : row.zero_set_ok) out << ',' << (ok ? 1 : 0);
        out << ',' << fmt(row.max_phi_p_phi) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& runs)
{
    out << "t,xi_err_mean,xi_err_std,ls_err_mean,ls_err_std,R_t_mean,R_t_std,zero_set_ok_fraction\n";
    if (runs.empty()) return;
    for (std::size_t t = 0; t < runs.front().rows.size(); ++t) {
        const auto xi = mean_std(pooled(runs, t, &RoundRecord::xi_error));
        const auto ls = mean_std(pooled(runs, t, &RoundRecord::ls_error));
        std::vector<double> regrets;
        double agree = 0.0, total = 0.0;
        for (const auto& run : runs) {
            regrets.push_back(run.rows[t].regret);
            for (bool ok : run.rows[t].zero_set_ok) {
                agree += ok ? 1.0 : 0.0;
                total += 1.0;
            }
        }
        const auto reg = mean_std(regrets);
        out << t << ',' << fmt(xi.mean) << ',' << fmt(xi.stddev) << ',' << fmt(ls.mean) << ','
            << fmt(ls.stddev) << ',' << fmt(reg.mean) << ',' << fmt(reg.stddev) << ','
            << fmt(agree / total) << '\n';
    }
}

void write_set_convergence_csv(std::ostream& out, const std::vector<RunRecord>& runs)
{
    out << "repeat,seed,sensor,T0\n";
    for (const auto& run : runs) {
        const auto t0 = run.set_convergence_time();
        for (std::size_t i = 0; i < t0.size(); ++i) {
            out << run.repeat << ',' << run.seed << ',' << (i + 1) << ',' << t0[i] << '\n';
        }
    }
}

void write_compare_csv(std::ostream& out, const Comparison& cmp)
{
    out << "t,distributed_err_mean,distributed_err_std,non_cooperative_err_mean,non_cooperative_err_std\n";
    if (cmp.distributed.empty()) return;
    for (std::size_t t = 0; t < cmp.distributed.front().rows.size(); ++t) {
        const auto d = mean_std(pooled(cmp.distributed, t, &RoundRecord::xi_error));
        const auto s = mean_std(pooled(cmp.non_cooperative, t, &RoundRecord::xi_error));
        out << t << ',' << fmt(d.mean) << ',' << fmt(d.stddev) << ',' << fmt(s.mean) << ','
            << fmt(s.stddev) << '\n';
    }
}

void write_excitation_csv(std::ostream& out, const std::vector<RunRecord>& runs)
{
    const std::size_t n = runs.empty() || runs.front().rows.empty()
                              ? 0
                              : runs.front().rows.front().solo_lambda_min.size();
    out << "repeat,t,r_t,lambda_n_t_min,coop_ratio";
    for (std::size_t i = 1; i <= n; ++i) out << ",solo_lambda_min_" << i;
    out << '\n';
    for (const auto& run : runs) {
        for (const auto& row : run.rows) {
            out << run.repeat << ',' << row.t << ',' << fmt(row.r) << ',' << fmt(row.lambda_n_t_min)
                << ',' << fmt(row.coop_ratio);
            for (double x : row.solo_lambda_min) out << ',' << fmt(x);
            out << '\n';
        }
    }
}

void write_state_header(std::ostream& out, std::size_t m)
{
    out << "t,i";
    for (std::size_t l = 1; l <= m; ++l) out << ",theta_ls_" << l;
    for (std::size_t l = 1; l <= m; ++l) out << ",xi_" << l;
    out << ",alpha,lambda_min,lambda_max\n";
}

void write_state_rows(std::ostream& out, const NetworkState<double>& net)
{
    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto& s = net.sensors[i];
        out << net.t << ',' << (i + 1);
        for (Eigen::Index l = 0; l < s.theta_ls.size(); ++l) out << ',' << fmt(s.theta_ls(l));
        for (Eigen::Index l = 0; l < s.xi.size(); ++l) out << ',' << fmt(s.xi(l));
        out << ',' << fmt(s.alpha) << ',' << fmt(s.spectrum.min) << ',' << fmt(s.spectrum.max) << '\n';
    }
}

void run_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                 std::size_t workers, const DumpOptions* dumps)
{
    std::filesystem::create_directories(out_dir);
    DumpOptions local;
    if (dumps) {
        local = *dumps;
        local.dir = out_dir;
    }
    const auto runs = run_repeats(cfg, workers, dumps ? &local : nullptr);
    for (const auto& run : runs) {
        auto out = open_out(out_dir / ("run_" + std::to_string(run.repeat) + ".csv"));
        write_run_csv(out, run);
    }
    auto summary = open_out(out_dir / "summary.csv");
    write_summary_csv(summary, runs);
    auto t0 = open_out(out_dir / "set_convergence.csv");
    write_set_convergence_csv(t0, runs);
}

void compare_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     std::size_t workers)
{
    std::filesystem::create_directories(out_dir);
    const auto cmp = compare_modes(cfg, workers);
    auto out = open_out(out_dir / "compare.csv");
    write_compare_csv(out, cmp);
}

void diagnose_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::size_t workers)
{
    std::filesystem::create_directories(out_dir);
    const auto runs = run_repeats(cfg, workers);
    auto out = open_out(out_dir / "excitation.csv");
    write_excitation_csv(out, runs);
}

} // namespace dsparse
