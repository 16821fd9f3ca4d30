#pragma once

#include "dsparse/config.hpp"
#include "dsparse/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace dsparse {

/// Optional per-run CSV dumps, all in the replay / snapshot formats.
struct DumpOptions {
    std::filesystem::path dir;
    bool states = false;       // states_<s>.csv
    bool solver = false;       // solver_<s>.csv
    bool observations = false; // observations_<s>.csv (replayable)
};

/// Seed of repeat s: hash64(cfg.seed, s).
std::uint64_t repeat_seed(const ExperimentConfig& cfg, std::size_t s);

/// Simulates one repeat for T rounds. `sensor_workers` parallelizes the
/// per-sensor work inside each round without changing any result.
RunRecord simulate_run(const ExperimentConfig& cfg, std::size_t repeat,
                       std::size_t sensor_workers = 1, const DumpOptions* dumps = nullptr);

/// All S repeats, spread over `workers` threads; output order is by repeat.
std::vector<RunRecord> run_repeats(const ExperimentConfig& cfg, std::size_t workers = 1,
                                   const DumpOptions* dumps = nullptr);

struct Comparison {
    std::vector<RunRecord> distributed;
    std::vector<RunRecord> non_cooperative;
};

/// Same seeds, distributed vs identity adjacency.
Comparison compare_modes(const ExperimentConfig& cfg, std::size_t workers = 1);

// CSV writers. Numbers use "%.17g"; infinities print as "inf".
void write_run_csv(std::ostream& out, const RunRecord& run);
void write_summary_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_set_convergence_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_compare_csv(std::ostream& out, const Comparison& cmp);
void write_excitation_csv(std::ostream& out, const std::vector<RunRecord>& runs);

/// Snapshot rows: t, i, theta_ls(1..m), xi(1..m), alpha, lambda_min, lambda_max.
void write_state_header(std::ostream& out, std::size_t m);
void write_state_rows(std::ostream& out, const NetworkState<double>& net);

/// Entry points of the CLI subcommands; each writes its files into `out_dir`.
void run_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                 std::size_t workers, const DumpOptions* dumps = nullptr);
void compare_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                     std::size_t workers);
void diagnose_command(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::size_t workers);

/// Mean of ||xi_{t,i} - theta|| over sensors and runs at row t.
double mean_error(const std::vector<RunRecord>& runs, std::size_t t);

} // namespace dsparse
