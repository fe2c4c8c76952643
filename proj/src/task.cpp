#include "adl/task.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace adl {

namespace {

using nlohmann::json;

void validate_task(const Task& t) {
  if (t.size_cm[0] <= 0.0 || t.size_cm[1] <= 0.0)
    throw std::runtime_error("task " + std::to_string(t.id) + ": size_cm must be strictly positive");
  if (t.has_grid()) {
    const size_t cols = t.grid[0].size();
    for (const auto& row : t.grid)
      if (row.size() != cols)
        throw std::runtime_error("task " + std::to_string(t.id) + ": ragged grid");
    if (t.grasp_cell) {
      const auto [r, c] = *t.grasp_cell;
      if (r < 0 || r >= t.grid_rows() || c < 0 || c >= t.grid_cols() || !t.grid[r][c])
        throw std::runtime_error("task " + std::to_string(t.id) + ": grasp cell not on an occupied cell");
    }
  }
}

}  // namespace

std::vector<double> grid_part_features(const Grid& grid, const std::array<double, 2>& size_cm) {
  constexpr int kPool = 8;
  std::vector<double> f(kPool * kPool + 2, 0.0);
  const int rows = static_cast<int>(grid.size());
  const int cols = rows ? static_cast<int>(grid[0].size()) : 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!grid[r][c]) continue;
      const int pr = r * kPool / rows;
      const int pc = c * kPool / cols;
      f[pr * kPool + pc] = 1.0;
    }
  }
  f[kPool * kPool] = size_cm[0];
  f[kPool * kPool + 1] = size_cm[1];
  return f;
}

int count_occupied(const Grid& grid) {
  int n = 0;
  for (const auto& row : grid)
    for (uint8_t cell : row) n += cell ? 1 : 0;
  return n;
}

std::string tasks_to_json(const std::vector<Task>& tasks) {
  json arr = json::array();
  for (const Task& t : tasks) {
    json o;
    o["id"] = t.id;
    o["features"] = t.features;
    if (t.has_grid()) {
      json rows = json::array();
      for (const auto& row : t.grid) {
        std::string s(row.size(), '0');
        for (size_t c = 0; c < row.size(); ++c)
          if (row[c]) s[c] = '1';
        rows.push_back(s);
      }
      o["grid"] = rows;
    }
    if (t.grasp_cell) o["grasp"] = {t.grasp_cell->first, t.grasp_cell->second};
    o["size_cm"] = {t.size_cm[0], t.size_cm[1]};
    o["costs"] = {{"c_rob", t.costs.c_rob},
                  {"c_hum", t.costs.c_hum},
                  {"c_demo", t.costs.c_demo},
                  {"c_fail", t.costs.c_fail}};
    arr.push_back(std::move(o));
  }
  return arr.dump(2) + "\n";
}

std::vector<Task> tasks_from_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("task set: malformed JSON: ") + e.what());
  }
  if (!arr.is_array()) throw std::runtime_error("task set: expected a top-level array");
  std::vector<Task> tasks;
  size_t feature_dim = 0;
  for (const auto& o : arr) {
    Task t;
    t.id = o.at("id").get<int>();
    t.features = o.at("features").get<std::vector<double>>();
    if (o.contains("grid")) {
      for (const auto& row : o.at("grid")) {
        const std::string s = row.get<std::string>();
        std::vector<uint8_t> cells(s.size());
        for (size_t c = 0; c < s.size(); ++c) {
          if (s[c] != '0' && s[c] != '1')
            throw std::runtime_error("task set: grid rows must be 0/1 strings");
          cells[c] = s[c] == '1' ? 1 : 0;
        }
        t.grid.push_back(std::move(cells));
      }
    }
    if (o.contains("grasp")) {
      const auto& g = o.at("grasp");
      t.grasp_cell = std::make_pair(g.at(0).get<int>(), g.at(1).get<int>());
    }
    t.size_cm = {o.at("size_cm").at(0).get<double>(), o.at("size_cm").at(1).get<double>()};
    const auto& c = o.at("costs");
    t.costs = {c.at("c_rob").get<double>(), c.at("c_hum").get<double>(),
               c.at("c_demo").get<double>(), c.at("c_fail").get<double>()};
    validate_task(t);
    if (tasks.empty())
      feature_dim = t.features.size();
    else if (t.features.size() != feature_dim)
      throw std::runtime_error("task set: inconsistent feature dimensions");
    tasks.push_back(std::move(t));
  }
  return tasks;
}

void save_tasks(const std::vector<Task>& tasks, const std::string& path) {
  write_file(path, tasks_to_json(tasks));
}

std::vector<Task> load_tasks(const std::string& path) {
  return tasks_from_json(read_file(path));
}

std::string library_to_json(const SkillLibrary& lib) {
  json o;
  json skills = json::array();
  for (const Skill& s : lib.skills) {
    json taps = json::array();
    for (const auto& tap : s.taps) taps.push_back({tap[0], tap[1]});
    skills.push_back({{"taps", taps},
                      {"trained_on", s.trained_on},
                      {"frame_size_cm", {s.frame_size_cm[0], s.frame_size_cm[1]}},
                      {"features", s.trained_features}});
  }
  o["skills"] = skills;
  o["provenance"] = lib.provenance;
  return o.dump(2) + "\n";
}

SkillLibrary library_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("skill library: malformed JSON: ") + e.what());
  }
  SkillLibrary lib;
  for (const auto& js : o.at("skills")) {
    Skill s;
    for (const auto& tap : js.at("taps"))
      s.taps.push_back({tap.at(0).get<double>(), tap.at(1).get<double>()});
    s.trained_on = js.at("trained_on").get<int>();
    s.frame_size_cm = {js.at("frame_size_cm").at(0).get<double>(),
                       js.at("frame_size_cm").at(1).get<double>()};
    s.trained_features = js.at("features").get<std::vector<double>>();
    lib.skills.push_back(std::move(s));
  }
  lib.provenance = o.at("provenance").get<std::vector<int>>();
  return lib;
}

void save_library(const SkillLibrary& lib, const std::string& path) {
  write_file(path, library_to_json(lib));
}

SkillLibrary load_library(const std::string& path) {
  return library_from_json(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace adl
