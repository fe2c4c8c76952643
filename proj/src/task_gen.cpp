#include "adl/task_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adl/rng.hpp"

namespace adl {

namespace {

constexpr int kWorkspaceCells = 20;  // 20x20 cm workspace, 1 cell = 1 cm
constexpr int kMaxPartExtent = 16;

// Grows a connected blob of cells by repeatedly attaching a uniformly
// chosen 4-neighbor of the current shape, then crops to the tight box.
Grid grow_polyomino(Rng& rng, int target_cells) {
  std::vector<std::vector<uint8_t>> cells(kMaxPartExtent, std::vector<uint8_t>(kMaxPartExtent, 0));
  std::vector<std::pair<int, int>> frontier;
  auto add_cell = [&](int r, int c) {
    cells[r][c] = 1;
    const int dr[] = {-1, 1, 0, 0};
    const int dc[] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nr >= kMaxPartExtent || nc < 0 || nc >= kMaxPartExtent) continue;
      if (!cells[nr][nc]) frontier.emplace_back(nr, nc);
    }
  };
  add_cell(kMaxPartExtent / 2, kMaxPartExtent / 2);
  int placed = 1;
  while (placed < target_cells && !frontier.empty()) {
    const size_t pick = static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(frontier.size()) - 1));
    const auto [r, c] = frontier[pick];
    frontier[pick] = frontier.back();
    frontier.pop_back();
    if (cells[r][c]) continue;
    add_cell(r, c);
    ++placed;
  }
  // crop to tight bounding box
  int rmin = kMaxPartExtent, rmax = -1, cmin = kMaxPartExtent, cmax = -1;
  for (int r = 0; r < kMaxPartExtent; ++r)
    for (int c = 0; c < kMaxPartExtent; ++c)
      if (cells[r][c]) {
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
      }
  Grid out(rmax - rmin + 1, std::vector<uint8_t>(cmax - cmin + 1, 0));
  for (int r = rmin; r <= rmax; ++r)
    for (int c = cmin; c <= cmax; ++c) out[r - rmin][c - cmin] = cells[r][c];
  return out;
}

// Nearest-neighbor resample to (rows2, cols2). When shrinking along an
// axis, cells are OR-pooled over their preimage so thin features (and
// nonemptiness) survive.
Grid resample(const Grid& src, int rows2, int cols2) {
  const int rows = static_cast<int>(src.size());
  const int cols = static_cast<int>(src[0].size());
  Grid out(rows2, std::vector<uint8_t>(cols2, 0));
  for (int r = 0; r < rows2; ++r) {
    const int ra = r * rows / rows2;
    const int rb = rows2 < rows ? std::max(ra + 1, (r + 1) * rows / rows2) : ra + 1;
    for (int c = 0; c < cols2; ++c) {
      const int ca = c * cols / cols2;
      const int cb = cols2 < cols ? std::max(ca + 1, (c + 1) * cols / cols2) : ca + 1;
      uint8_t v = 0;
      for (int rr = ra; rr < rb && !v; ++rr)
        for (int cc = ca; cc < cb && !v; ++cc) v = src[rr][cc];
      out[r][c] = v;
    }
  }
  return out;
}

Grid pad(const Grid& src, int top, int bottom, int left, int right) {
  const int cols = static_cast<int>(src[0].size());
  Grid out;
  out.reserve(src.size() + top + bottom);
  for (int r = 0; r < top; ++r) out.emplace_back(cols + left + right, 0);
  for (const auto& row : src) {
    std::vector<uint8_t> padded(left, 0);
    padded.insert(padded.end(), row.begin(), row.end());
    padded.insert(padded.end(), right, 0);
    out.push_back(std::move(padded));
  }
  for (int r = 0; r < bottom; ++r) out.emplace_back(cols + left + right, 0);
  return out;
}

std::pair<int, int> random_occupied_cell(const Grid& grid, Rng& rng) {
  std::vector<std::pair<int, int>> occ;
  for (int r = 0; r < static_cast<int>(grid.size()); ++r)
    for (int c = 0; c < static_cast<int>(grid[r].size()); ++c)
      if (grid[r][c]) occ.emplace_back(r, c);
  return occ[rng.uniform_int(0, static_cast<int64_t>(occ.size()) - 1)];
}

Grid block_env_walls(uint64_t seed, int env) {
  Grid grid(kWorkspaceCells, std::vector<uint8_t>(kWorkspaceCells, 0));
  Rng rng(substream(seed, 500 + static_cast<uint64_t>(env)));
  const int n_walls = env % 4 + 1;
  std::vector<int> used_rows, used_cols;
  for (int w = 0; w < n_walls; ++w) {
    const bool vertical = w % 2 == 0;
    auto& used = vertical ? used_cols : used_rows;
    int pos;
    do {
      pos = static_cast<int>(rng.uniform_int(3, kWorkspaceCells - 4));
    } while (std::find(used.begin(), used.end(), pos) != used.end());
    used.push_back(pos);
    for (int k = 2; k < kWorkspaceCells - 2; ++k) {
      if (vertical)
        grid[k][pos] = 1;
      else
        grid[pos][k] = 1;
    }
  }
  return grid;
}

}  // namespace

std::vector<Task> generate_grid_part_tasks(int count, uint64_t seed, int shape_family_count,
                                           const CostVector& costs) {
  if (count < 1) throw std::invalid_argument("generate_grid_part_tasks: count must be >= 1");
  if (shape_family_count < 1)
    throw std::invalid_argument("generate_grid_part_tasks: shape_family_count must be >= 1");

  std::vector<Grid> base_shapes;
  base_shapes.reserve(shape_family_count);
  for (int f = 0; f < shape_family_count; ++f) {
    Rng rng(substream(seed, 1000 + static_cast<uint64_t>(f)));
    base_shapes.push_back(grow_polyomino(rng, static_cast<int>(rng.uniform_int(8, 36))));
  }

  std::vector<Task> tasks;
  tasks.reserve(count);
  for (int t = 0; t < count; ++t) {
    const int family = t % shape_family_count;
    const Grid& base = base_shapes[family];
    Rng rng(substream(seed, 2000000 + static_cast<uint64_t>(t)));

    const double s = rng.uniform(0.8, 1.3);
    const int rows2 = std::clamp(static_cast<int>(std::lround(base.size() * s)), 1, kMaxPartExtent + 2);
    const int cols2 = std::clamp(static_cast<int>(std::lround(base[0].size() * s)), 1, kMaxPartExtent + 2);
    Grid part = resample(base, rows2, cols2);
    // loose user-drawn bounding box: a little empty margin on each side
    part = pad(part, static_cast<int>(rng.uniform_int(0, 2)), static_cast<int>(rng.uniform_int(0, 2)),
               static_cast<int>(rng.uniform_int(0, 2)), static_cast<int>(rng.uniform_int(0, 2)));

    Task task;
    task.id = t;
    task.family = family;
    task.grid = std::move(part);
    task.size_cm = {static_cast<double>(task.grid_cols()), static_cast<double>(task.grid_rows())};
    task.grasp_cell = random_occupied_cell(task.grid, rng);
    task.features = grid_part_features(task.grid, task.size_cm);
    task.costs = costs;
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<Task> generate_block_tasks(int count, uint64_t seed, int env_count, const CostVector& costs) {
  if (count < 1) throw std::invalid_argument("generate_block_tasks: count must be >= 1");
  if (env_count < 1) throw std::invalid_argument("generate_block_tasks: env_count must be >= 1");

  constexpr double kSigma = 0.3;
  constexpr double kMargin = 2.0;
  std::vector<Grid> env_grids;
  env_grids.reserve(env_count);
  for (int e = 0; e < env_count; ++e) env_grids.push_back(block_env_walls(seed, e));

  std::vector<Task> tasks;
  tasks.reserve(count);
  for (int t = 0; t < count; ++t) {
    const int env = t % env_count;
    Rng rng(substream(seed, 900000 + static_cast<uint64_t>(t)));
    const double slot_x = rng.uniform(kMargin, kWorkspaceCells - kMargin);
    const double slot_y = rng.uniform(kMargin, kWorkspaceCells - kMargin);

    Task task;
    task.id = t;
    task.family = env;
    task.features.assign(env_count, 0.0);
    task.features[env] = 1.0;
    task.features.push_back(slot_x);
    task.features.push_back(slot_y);
    task.features.push_back(kSigma);
    task.size_cm = {static_cast<double>(kWorkspaceCells), static_cast<double>(kWorkspaceCells)};
    task.costs = costs;

    task.grid = env_grids[env];
    const int slot_r = std::clamp(static_cast<int>(std::floor(slot_y)), 0, kWorkspaceCells - 2);
    const int slot_c = std::clamp(static_cast<int>(std::floor(slot_x)), 0, kWorkspaceCells - 2);
    for (int dr = 0; dr < 2; ++dr)
      for (int dc = 0; dc < 2; ++dc) task.grid[slot_r + dr][slot_c + dc] = 1;
    task.grasp_cell = std::make_pair(slot_r, slot_c);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

SkillLibrary pretrain_library(const std::vector<Task>& tasks, int k, uint64_t seed, const SimConfig& sim,
                              int retry_limit) {
  if (k < 0 || k > static_cast<int>(tasks.size()))
    throw std::invalid_argument("pretrain_library: k must be in [0, |tasks|]");
  std::vector<int> order(tasks.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(substream(seed, 777));
  rng.shuffle(order);

  SkillLibrary lib;
  int failures = 0;
  for (int idx : order) {
    if (static_cast<int>(lib.size()) == k) break;
    try {
      lib.skills.push_back(learn_skill(tasks[idx], sim));
      lib.provenance.push_back(tasks[idx].id);
    } catch (const CoverageUnreachable&) {
      if (++failures > retry_limit)
        throw std::runtime_error("pretrain_library: exceeded retry limit (" + std::to_string(retry_limit) +
                                 " failed skills)");
    }
  }
  if (static_cast<int>(lib.size()) < k)
    throw std::runtime_error("pretrain_library: task pool exhausted before reaching k skills");
  return lib;
}

}  // namespace adl
