#include "byzpg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace byzpg {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void append_row(std::string& out, int run, const IterationRecord& r) {
  out += std::to_string(run);
  out += ',';
  out += std::to_string(r.iteration);
  out += ',';
  out += std::to_string(r.coin);
  out += ',';
  out += std::to_string(r.traj_per_agent);
  out += ',';
  out += fmt(r.mean_honest_return);
  out += ',';
  out += fmt(r.mean_honest_return_disc);
  out += ',';
  out += fmt(r.max_importance_weight);
  out += ',';
  out += fmt(r.honest_diameter);
  out += ',';
  for (std::size_t i = 0; i < r.honest_returns.size(); ++i) {
    if (i) out += ';';
    out += fmt(r.honest_returns[i]);
  }
  out += '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int max_parallel) {
  ExperimentResult result;
  result.seeds.resize(static_cast<std::size_t>(config.runs));
  for (int r = 0; r < config.runs; ++r) result.seeds[static_cast<std::size_t>(r)] = config.seed + static_cast<std::uint64_t>(r);
  result.runs.resize(static_cast<std::size_t>(config.runs));

  int workers = max_parallel > 0 ? max_parallel
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.runs);

  std::atomic<int> next{0};
  std::vector<std::future<void>> futs;
  futs.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    futs.push_back(std::async(std::launch::async, [&]() {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= config.runs) return;
        result.runs[static_cast<std::size_t>(r)] =
            run_single(make_engine_inputs(config, result.seeds[static_cast<std::size_t>(r)]));
      }
    }));
  }
  for (auto& f : futs) f.get();  // rethrows run failures
  return result;
}

std::string metrics_csv_text(const ExperimentConfig& config, const ExperimentResult& result) {
  std::string out;
  out += "# byzpg metrics v1\n";
  out += "# config ";
  out += config_to_json(config);
  out += '\n';
  out += "# base_seed " + std::to_string(config.seed) + "\n";
  out += "run,iteration,coin,traj_per_agent,mean_honest_return,mean_honest_return_disc,"
         "max_importance_weight,honest_diameter,honest_returns\n";
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    for (const IterationRecord& rec : result.runs[r].records) {
      append_row(out, static_cast<int>(r), rec);
    }
  }
  return out;
}

double return_at_budget(const RunResult& run, long long budget) {
  double acc = 0.0;
  int n = 0;
  for (auto it = run.records.rbegin(); it != run.records.rend(); ++it) {
    if (it->traj_per_agent > budget) continue;
    acc += it->mean_honest_return;
    if (++n == 3) break;
  }
  return n > 0 ? acc / n : 0.0;
}

long long trajectories_to_threshold(const RunResult& run, double threshold) {
  double window[3] = {0.0, 0.0, 0.0};
  int seen = 0;
  for (const IterationRecord& rec : run.records) {
    window[seen % 3] = rec.mean_honest_return;
    ++seen;
    const int n = std::min(seen, 3);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += window[i];
    mean /= n;
    if (mean >= threshold) return rec.traj_per_agent;
  }
  return -1;
}

std::string summary_csv_text(const ExperimentResult& result, int grid_points) {
  long long max_traj = 0;
  for (const RunResult& run : result.runs) {
    if (!run.records.empty()) max_traj = std::max(max_traj, run.records.back().traj_per_agent);
  }
  std::string out = "# byzpg summary v1\ntraj_per_agent,mean_return,std_return,runs\n";
  if (max_traj == 0 || result.runs.empty()) return out;
  for (int g = 1; g <= grid_points; ++g) {
    const long long budget = max_traj * g / grid_points;
    std::vector<double> vals;
    for (const RunResult& run : result.runs) {
      if (run.records.empty() || run.records.front().traj_per_agent > budget) continue;
      vals.push_back(return_at_budget(run, budget));
    }
    if (vals.empty()) continue;
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
    out += std::to_string(budget) + ',' + fmt(mean) + ',' + fmt(std::sqrt(var)) + ',' +
           std::to_string(vals.size()) + '\n';
  }
  return out;
}

void write_experiment_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  std::filesystem::create_directories(config.out_dir);
  {
    std::ofstream f(std::filesystem::path(config.out_dir) / "metrics.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write metrics.csv under " + config.out_dir);
    f << metrics_csv_text(config, result);
  }
  {
    std::ofstream f(std::filesystem::path(config.out_dir) / "summary.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot write summary.csv under " + config.out_dir);
    f << summary_csv_text(result);
  }
}

bool replay(const std::string& csv_ref, std::string* message) {
  const auto hash = csv_ref.rfind('#');
  if (hash == std::string::npos) {
    if (message) *message = "reference must look like path/metrics.csv#RUN";
    return false;
  }
  const std::string path = csv_ref.substr(0, hash);
  const int run_id = std::stoi(csv_ref.substr(hash + 1));

  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (message) *message = "cannot open " + path;
    return false;
  }
  std::string line, config_json;
  std::vector<std::string> rows;
  const std::string prefix = std::to_string(run_id) + ",";
  while (std::getline(in, line)) {
    if (line.rfind("# config ", 0) == 0) {
      config_json = line.substr(9);
    } else if (line.rfind(prefix, 0) == 0) {
      rows.push_back(line);
    }
  }
  if (config_json.empty()) {
    if (message) *message = "no '# config' header found in " + path;
    return false;
  }
  ExperimentConfig config = parse_config(config_json);
  if (run_id < 0 || run_id >= config.runs) {
    if (message) *message = "run id out of range for this experiment";
    return false;
  }
  RunResult rerun = run_single(make_engine_inputs(config, config.seed + static_cast<std::uint64_t>(run_id)));
  std::string regenerated;
  for (const IterationRecord& rec : rerun.records) append_row(regenerated, run_id, rec);

  std::string original;
  for (const std::string& r : rows) {
    original += r;
    original += '\n';
  }
  const bool ok = original == regenerated;
  if (message) {
    *message = ok ? "replay verified: " + std::to_string(rows.size()) + " rows identical"
                  : "replay mismatch: regenerated rows differ from the recorded ones";
  }
  return ok;
}

}  // namespace byzpg
