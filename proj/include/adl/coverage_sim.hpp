#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adl/task.hpp"

namespace adl {

// Abstract coverage simulation: a skill is a sequence of taps, each
// effective within a fixed physical radius, and a part counts as solved
// once the required fraction of its occupied cells is covered.
struct SimConfig {
  double tap_radius_cm = 3.0;
  int max_taps = 2000;  // cap on tap samples per skill before giving up
  double coverage_threshold = 1.0;
  uint64_t seed = 0;
};

struct CoverageUnreachable : std::runtime_error {
  explicit CoverageUnreachable(const std::string& what) : std::runtime_error(what) {}
};

// Learns a tap skill on the task's part by sampling occupied cells
// uniformly until coverage reaches cfg.coverage_threshold; taps that
// cover no new cells are discarded. Pure function of (task, cfg).
// Throws CoverageUnreachable if cfg.max_taps samples are not enough.
Skill learn_skill(const Task& task, const SimConfig& cfg);

// Rescales the skill's taps from its normalized frame onto the target
// part's occupied bounding box (nearest cell) and checks coverage.
bool evaluate_skill(const Skill& skill, const Task& task, const SimConfig& cfg);

struct DatasetRow {
  int train_id = -1;
  int test_id = -1;
  std::vector<double> train_features;
  std::vector<double> test_features;
  int label = 0;
};

struct Dataset {
  int feature_dim = 0;
  std::vector<DatasetRow> rows;
  std::vector<int> skipped_train_ids;  // training tasks where learning failed
};

// Data collection in the abstract simulation: samples an m-task
// evaluation set and n training tasks (both without replacement) from
// the pool, learns a skill per training task and labels it against the
// evaluation set. Yields m*n rows minus m per skipped training task.
Dataset get_training_data(int m, int n, const std::vector<Task>& pool, const SimConfig& cfg);

// CSV: train_id,test_id,feat_train_0..D-1,feat_test_0..D-1,label
std::string dataset_to_csv(const Dataset& ds);
void save_dataset_csv(const Dataset& ds, const std::string& path);

}  // namespace adl
