#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adl/baselines.hpp"
#include "adl/coverage_sim.hpp"
#include "adl/planner.hpp"
#include "adl/precond_model.hpp"

namespace adl {

// Experiment harness configuration. All randomness derives from
// root_seed: ground task set, precondition dataset and model, and per-
// (level, seed) test sequences, pretraining draws and execution rollouts
// each use their own derived stream.
struct ExperimentConfig {
  std::string domain;  // "grid_part" | "block"
  int n_tasks = 0;     // test sequence length
  std::vector<int> pretrain_levels;
  std::vector<uint64_t> seeds;
  std::string out_dir;

  uint64_t root_seed = 0;
  int ground_count = 150;
  int families = 15;  // grid_part ground set
  int envs = 4;       // block ground set
  CostVector costs;
  std::vector<double> cba_thetas{0.2, 0.5};
  Mode mode = Mode::mdp_consistent;
  int mc_trials = 1000;
  int data_m = 0;  // 0 = full ground set
  int data_n = 0;
  bool pretrain_overlap = false;  // allow pretraining on test-sequence tasks
  SimConfig sim;
  TrainConfig train;
  std::string model_path;  // skip in-run training when set
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

struct BenchRow {
  int level = 0;
  uint64_t seed = 0;
  std::string method;
  double objective = 0.0;
  double realized_mean = 0.0;
  double demos = 0.0;
  double delegations = 0.0;
  double failures = 0.0;
  double wall_time_ms = 0.0;
};

struct BenchSummaryRow {
  int level = 0;
  std::string method;
  double mean_objective = 0.0;
  double mean_realized = 0.0;
  double adl_delta = 0.0;  // mean_objective - mean ADL objective at this level
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSummaryRow> summary;
  double greedy_ratio_mean = 1.0;  // greedy objective / optimal, over all rows
  double greedy_ratio_max = 1.0;
  TrainReport train_report;
  bool model_trained = false;
};

// Runs the full experiment grid and writes results.csv, summary.csv and
// (when trained in-run) model.json under cfg.out_dir. The optimal-planner
// column is asserted against every baseline row; a violation throws.
BenchResult run_bench(const ExperimentConfig& cfg, std::ostream* log = nullptr);

std::string bench_rows_csv(const std::vector<BenchRow>& rows);
std::string bench_summary_csv(const BenchResult& result);

}  // namespace adl
