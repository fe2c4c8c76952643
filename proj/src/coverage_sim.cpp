#include "adl/coverage_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "adl/rng.hpp"

namespace adl {

namespace {

struct PartView {
  std::vector<std::pair<int, int>> occupied;  // (row, col)
  int r0 = 0, c0 = 0, rows = 0, cols = 0;     // occupied bounding box
  double cell_w_cm = 1.0, cell_h_cm = 1.0;
};

PartView view_of(const Task& task, const char* op) {
  if (!task.has_grid())
    throw std::invalid_argument(std::string(op) + ": task " + std::to_string(task.id) + " has no grid");
  PartView v;
  int rmin = task.grid_rows(), rmax = -1, cmin = task.grid_cols(), cmax = -1;
  for (int r = 0; r < task.grid_rows(); ++r) {
    for (int c = 0; c < task.grid_cols(); ++c) {
      if (!task.grid[r][c]) continue;
      v.occupied.emplace_back(r, c);
      rmin = std::min(rmin, r);
      rmax = std::max(rmax, r);
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
  }
  if (v.occupied.empty())
    throw std::invalid_argument(std::string(op) + ": task " + std::to_string(task.id) + " has an empty part");
  v.r0 = rmin;
  v.c0 = cmin;
  v.rows = rmax - rmin + 1;
  v.cols = cmax - cmin + 1;
  v.cell_w_cm = task.size_cm[0] / task.grid_cols();
  v.cell_h_cm = task.size_cm[1] / task.grid_rows();
  return v;
}

// Marks every occupied cell within the tap radius of the tap cell's
// center; returns how many were newly covered.
int apply_tap(const PartView& v, int tap_r, int tap_c, double radius_cm, std::vector<uint8_t>& covered) {
  const double r2 = radius_cm * radius_cm;
  int newly = 0;
  for (size_t k = 0; k < v.occupied.size(); ++k) {
    if (covered[k]) continue;
    const double dr = (v.occupied[k].first - tap_r) * v.cell_h_cm;
    const double dc = (v.occupied[k].second - tap_c) * v.cell_w_cm;
    if (dr * dr + dc * dc <= r2) {
      covered[k] = 1;
      ++newly;
    }
  }
  return newly;
}

bool reached(int covered, int total, double threshold) {
  return static_cast<double>(covered) / total >= threshold - 1e-12;
}

void append_double(std::string& out, double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, res.ptr);
}

}  // namespace

Skill learn_skill(const Task& task, const SimConfig& cfg) {
  const PartView v = view_of(task, "learn_skill");
  Rng rng(substream(cfg.seed, 0xC0FFEEull + static_cast<uint64_t>(task.id)));

  std::vector<uint8_t> covered(v.occupied.size(), 0);
  int covered_count = 0;
  const int total = static_cast<int>(v.occupied.size());
  std::vector<std::pair<int, int>> tap_cells;

  for (int attempt = 0; attempt < cfg.max_taps && !reached(covered_count, total, cfg.coverage_threshold);
       ++attempt) {
    const auto [r, c] = v.occupied[rng.uniform_int(0, total - 1)];
    const int newly = apply_tap(v, r, c, cfg.tap_radius_cm, covered);
    if (newly == 0) continue;  // redundant tap, discard
    covered_count += newly;
    tap_cells.emplace_back(r, c);
  }
  if (!reached(covered_count, total, cfg.coverage_threshold))
    throw CoverageUnreachable("learn_skill: task " + std::to_string(task.id) + " not covered after " +
                              std::to_string(cfg.max_taps) + " tap samples");

  Skill skill;
  skill.trained_on = task.id;
  skill.trained_features = task.features;
  skill.frame_size_cm = {v.cols * v.cell_w_cm, v.rows * v.cell_h_cm};
  for (const auto& [r, c] : tap_cells)
    skill.taps.push_back({(r - v.r0 + 0.5) / v.rows, (c - v.c0 + 0.5) / v.cols});
  return skill;
}

bool evaluate_skill(const Skill& skill, const Task& task, const SimConfig& cfg) {
  const PartView v = view_of(task, "evaluate_skill");
  std::vector<uint8_t> covered(v.occupied.size(), 0);
  int covered_count = 0;
  for (const auto& tap : skill.taps) {
    const int r = v.r0 + std::min(v.rows - 1, static_cast<int>(std::floor(tap[0] * v.rows)));
    const int c = v.c0 + std::min(v.cols - 1, static_cast<int>(std::floor(tap[1] * v.cols)));
    covered_count += apply_tap(v, r, c, cfg.tap_radius_cm, covered);
  }
  return reached(covered_count, static_cast<int>(v.occupied.size()), cfg.coverage_threshold);
}

Dataset get_training_data(int m, int n, const std::vector<Task>& pool, const SimConfig& cfg) {
  if (m < 1 || n < 1) throw std::invalid_argument("get_training_data: m and n must be >= 1");
  const int pool_size = static_cast<int>(pool.size());
  if (m > pool_size || n > pool_size)
    throw std::invalid_argument("get_training_data: m and n must not exceed the task pool size");

  std::vector<int> eval_idx(pool.size());
  std::iota(eval_idx.begin(), eval_idx.end(), 0);
  std::vector<int> train_idx = eval_idx;
  Rng eval_rng(substream(cfg.seed, 11));
  eval_rng.shuffle(eval_idx);
  eval_idx.resize(m);
  Rng train_rng(substream(cfg.seed, 22));
  train_rng.shuffle(train_idx);
  train_idx.resize(n);

  Dataset ds;
  ds.feature_dim = pool.empty() ? 0 : static_cast<int>(pool[0].features.size());
  for (int ti : train_idx) {
    const Task& train_task = pool[ti];
    Skill skill;
    try {
      skill = learn_skill(train_task, cfg);
    } catch (const CoverageUnreachable&) {
      ds.skipped_train_ids.push_back(train_task.id);
      continue;
    }
    for (int ei : eval_idx) {
      const Task& test_task = pool[ei];
      DatasetRow row;
      row.train_id = train_task.id;
      row.test_id = test_task.id;
      row.train_features = train_task.features;
      row.test_features = test_task.features;
      row.label = evaluate_skill(skill, test_task, cfg) ? 1 : 0;
      ds.rows.push_back(std::move(row));
    }
  }
  return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
  std::string out = "train_id,test_id";
  for (int i = 0; i < ds.feature_dim; ++i) out += ",feat_train_" + std::to_string(i);
  for (int i = 0; i < ds.feature_dim; ++i) out += ",feat_test_" + std::to_string(i);
  out += ",label\n";
  for (const DatasetRow& row : ds.rows) {
    out += std::to_string(row.train_id);
    out += ',';
    out += std::to_string(row.test_id);
    for (double f : row.train_features) {
      out += ',';
      append_double(out, f);
    }
    for (double f : row.test_features) {
      out += ',';
      append_double(out, f);
    }
    out += ',';
    out += std::to_string(row.label);
    out += '\n';
  }
  return out;
}

void save_dataset_csv(const Dataset& ds, const std::string& path) {
  write_file(path, dataset_to_csv(ds));
}

}  // namespace adl
