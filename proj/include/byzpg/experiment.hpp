#pragma once

#include <string>
#include <vector>

#include "byzpg/config.hpp"

namespace byzpg {

struct ExperimentResult {
  std::vector<std::uint64_t> seeds;  // root seed per run
  std::vector<RunResult> runs;
};

/// run_count independent seeded runs (seed, seed+1, ...). Runs execute in
/// parallel up to max_parallel (0 = hardware concurrency); results are
/// deterministic regardless of parallelism.
ExperimentResult run_experiment(const ExperimentConfig& config, int max_parallel = 0);

/// Full metrics table as CSV text. Header comments carry the canonical config
/// and base seed so any row can be replayed.
std::string metrics_csv_text(const ExperimentConfig& config, const ExperimentResult& result);

/// Mean and standard deviation of honest returns across runs, keyed by
/// per-agent trajectory count on a fixed grid. Gnuplot-friendly columns.
std::string summary_csv_text(const ExperimentResult& result, int grid_points = 100);

/// Writes metrics.csv and summary.csv into config.out_dir (created if needed).
void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result);

/// Reference "path/to/metrics.csv#RUN": re-runs run RUN from the config and
/// seed recorded in the CSV header and verifies its rows byte-for-byte.
bool replay(const std::string& csv_ref, std::string* message);

/// Return value at a per-agent trajectory budget: mean of the last up-to-3
/// records at or before the budget (empty curve yields 0).
double return_at_budget(const RunResult& run, long long budget);

/// First per-agent trajectory count at which the 3-record trailing mean of
/// honest returns reaches the threshold; -1 if never.
long long trajectories_to_threshold(const RunResult& run, double threshold);

}  // namespace byzpg
