#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adl {

// Per-task effort costs, in abstract effort units.
struct CostVector {
  double c_rob = 10.0;
  double c_hum = 100.0;
  double c_demo = 200.0;
  double c_fail = 100.0;
};

// Binary occupancy grid, rows x cols, one cell per grid unit.
using Grid = std::vector<std::vector<uint8_t>>;

struct Task {
  int id = 0;
  std::vector<double> features;
  Grid grid;  // empty for parametric (gridless) domains
  std::optional<std::pair<int, int>> grasp_cell;  // (row, col)
  std::array<double, 2> size_cm{0.0, 0.0};        // (width, height)
  CostVector costs;
  int family = -1;  // generator provenance, not serialized

  bool has_grid() const { return !grid.empty(); }
  int grid_rows() const { return static_cast<int>(grid.size()); }
  int grid_cols() const { return grid.empty() ? 0 : static_cast<int>(grid[0].size()); }
};

// A tap-sequence policy in a normalized part frame. Tap coordinates are
// (row, col) scaled to [0,1]x[0,1] over the training part's occupied
// bounding box; evaluation rescales them onto the target part.
struct Skill {
  std::vector<std::array<double, 2>> taps;
  int trained_on = -1;
  std::array<double, 2> frame_size_cm{0.0, 0.0};  // (width, height)
  // Feature vector of the training task; kept so transfer success can be
  // predicted for this skill without access to the original task set.
  std::vector<double> trained_features;
};

struct SkillLibrary {
  std::vector<Skill> skills;
  std::vector<int> provenance;  // training-task ids, in acquisition order

  bool empty() const { return skills.empty(); }
  size_t size() const { return skills.size(); }
};

// 66-D grid-part features: the occupancy grid max-pooled onto an 8x8
// raster (a source cell (r,c) maps to pool cell (r*8/rows, c*8/cols)),
// flattened row-major, followed by the part's width and height in cm.
std::vector<double> grid_part_features(const Grid& grid, const std::array<double, 2>& size_cm);

int count_occupied(const Grid& grid);

// Task-set JSON: top-level array of
//   {id, features[], grid (row-major 0/1 string list), grasp:[r,c],
//    size_cm:[w,h], costs:{c_rob,c_hum,c_demo,c_fail}}
// with grid/grasp omitted for gridless tasks.
std::string tasks_to_json(const std::vector<Task>& tasks);
std::vector<Task> tasks_from_json(const std::string& text);
void save_tasks(const std::vector<Task>& tasks, const std::string& path);
std::vector<Task> load_tasks(const std::string& path);

std::string library_to_json(const SkillLibrary& lib);
SkillLibrary library_from_json(const std::string& text);
void save_library(const SkillLibrary& lib, const std::string& path);
SkillLibrary load_library(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace adl
