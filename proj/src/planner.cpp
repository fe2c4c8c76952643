#include "adl/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace adl {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

int action_rank(Action a) {
  switch (a) {
    case Action::act: return 0;
    case Action::delegate: return 1;
    case Action::learn: return 2;
  }
  return 3;
}

// Tie preference between equal-cost plans: act over delegate over learn,
// decided at the lowest differing task index.
bool lex_preferred(const std::vector<Action>& a, const std::vector<Action>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return action_rank(a[i]) < action_rank(b[i]);
  }
  return false;
}

double act_cost(const CostVector& c, double p) { return c.c_rob + (1.0 - p) * c.c_fail; }

Plan finalize_plan(const PlanInstance& inst, std::vector<Action> actions, SolverMeta meta) {
  Plan plan;
  plan.objective = expected_plan_cost(inst, actions);
  plan.actions = std::move(actions);
  plan.serving.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    if (plan.actions[i] != Action::act) continue;
    Serving s;
    double best = inst.rho0[i];
    if (best > 0.0) s.source = Serving::Source::pretrained;
    for (int j = 0; j < i; ++j) {
      if (plan.actions[j] == Action::learn && inst.rho[i][j] > best) {
        best = inst.rho[i][j];
        s.source = Serving::Source::learned;
        s.learned_from = j;
      }
    }
    plan.serving[i] = s;
  }
  meta.gap = plan.objective > 1e-300 ? std::max(0.0, (plan.objective - meta.lower_bound) / plan.objective) : 0.0;
  plan.meta = meta;
  return plan;
}

// Admissible per-task charges given partial demo decisions:
// state[j] = 1 committed demo, -1 committed no-demo, 0 undecided.
// Every not-ruled-out demo is treated as available free of charge.
double bound_with_state(const PlanInstance& inst, const std::vector<int8_t>& state) {
  double lb = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const CostVector& c = inst.costs[i];
    double p_act = inst.rho0[i];
    for (int j = 0; j < i; ++j) {
      if (state[j] != -1) p_act = std::max(p_act, inst.rho[i][j]);
    }
    const double act = act_cost(c, p_act);
    if (state[i] == -1) {
      lb += std::min(act, c.c_hum);
      continue;
    }
    const double p_learn = std::max(p_act, inst.rho[i][i]);
    double demo = c.c_demo;
    if (inst.mode == Mode::literal_paper) demo += c.c_fail * (1.0 - p_learn);
    lb += state[i] == 1 ? demo : std::min({act, c.c_hum, demo});
  }
  return lb;
}

void guard_oracle_size(const PlanInstance& inst, const char* op) {
  if (inst.n > 20)
    throw std::invalid_argument(std::string(op) + ": n = " + std::to_string(inst.n) +
                                " exceeds the oracle guard (20); use plan_bnb");
}

struct BnbSearch {
  const PlanInstance& inst;
  double gap_tolerance;
  std::vector<int> branch_order;
  std::vector<int8_t> state;
  double incumbent = kInf;
  std::vector<Action> incumbent_actions;
  long nodes = 0;
  double min_pruned_lb = kInf;

  BnbSearch(const PlanInstance& instance, double gap)
      : inst(instance), gap_tolerance(gap), state(instance.n, 0) {
    branch_order.resize(inst.n);
    std::iota(branch_order.begin(), branch_order.end(), 0);
    std::vector<double> score(inst.n, 0.0);
    for (int j = 0; j < inst.n; ++j)
      for (int i = j; i < inst.n; ++i) score[j] += inst.rho[i][j] * inst.costs[i].c_fail;
    std::stable_sort(branch_order.begin(), branch_order.end(),
                     [&](int a, int b) { return score[a] > score[b]; });
  }

  std::vector<Action> leaf_actions() const {
    std::vector<Action> actions(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      if (state[i] == 1) {
        actions[i] = Action::learn;
        continue;
      }
      double p = inst.rho0[i];
      for (int j = 0; j < i; ++j)
        if (state[j] == 1) p = std::max(p, inst.rho[i][j]);
      actions[i] = act_cost(inst.costs[i], p) <= inst.costs[i].c_hum ? Action::act : Action::delegate;
    }
    return actions;
  }

  void dfs(int depth, double node_lb) {
    ++nodes;
    if (depth == inst.n) {
      if (node_lb < incumbent) {
        incumbent = node_lb;
        incumbent_actions = leaf_actions();
      }
      return;
    }
    const int var = branch_order[depth];
    struct Child {
      int8_t value;
      double lb;
    };
    Child children[2];
    for (int k = 0; k < 2; ++k) {
      state[var] = k == 0 ? -1 : 1;
      children[k] = {state[var], bound_with_state(inst, state)};
    }
    state[var] = 0;
    if (children[1].lb < children[0].lb) std::swap(children[0], children[1]);
    for (const Child& child : children) {
      if (child.lb * (1.0 + gap_tolerance) >= incumbent) {
        min_pruned_lb = std::min(min_pruned_lb, child.lb);
        continue;
      }
      state[var] = child.value;
      dfs(depth + 1, child.lb);
      state[var] = 0;
    }
  }
};

void append_serving_json(json& arr, const Serving& s) {
  switch (s.source) {
    case Serving::Source::none: arr.push_back(nullptr); break;
    case Serving::Source::pretrained: arr.push_back("pretrained"); break;
    case Serving::Source::learned: arr.push_back(s.learned_from); break;
  }
}

}  // namespace

std::string mode_to_string(Mode mode) {
  return mode == Mode::mdp_consistent ? "mdp_consistent" : "literal_paper";
}

Mode mode_from_string(const std::string& text) {
  if (text == "mdp_consistent" || text == "mdp") return Mode::mdp_consistent;
  if (text == "literal_paper" || text == "literal") return Mode::literal_paper;
  throw std::invalid_argument("unknown mode: " + text);
}

std::string action_to_string(Action a) {
  switch (a) {
    case Action::act: return "act";
    case Action::delegate: return "delegate";
    case Action::learn: return "learn";
  }
  return "?";
}

Action action_from_string(const std::string& text) {
  if (text == "act") return Action::act;
  if (text == "delegate") return Action::delegate;
  if (text == "learn") return Action::learn;
  throw std::invalid_argument("unknown action: " + text);
}

PlanInstance build_instance(const std::vector<Task>& tasks, const SkillLibrary& library,
                            const PreconditionModel& model, Mode mode) {
  if (tasks.empty()) throw std::invalid_argument("build_instance: empty task sequence");
  PlanInstance inst;
  inst.n = static_cast<int>(tasks.size());
  inst.mode = mode;
  inst.rho0.resize(inst.n, 0.0);
  inst.rho.resize(inst.n);
  inst.costs.reserve(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const Task& task = tasks[i];
    inst.costs.push_back(task.costs);
    double best = 0.0;
    for (const Skill& skill : library.skills)
      best = std::max(best, model.predict_pair(skill.trained_features, task.features));
    inst.rho0[i] = best;
    inst.rho[i].resize(i + 1);
    for (int j = 0; j <= i; ++j)
      inst.rho[i][j] = model.predict_pair(tasks[j].features, task.features);
  }
  return inst;
}

void validate_instance(const PlanInstance& inst) {
  if (inst.n < 1) throw std::invalid_argument("instance: n must be >= 1");
  if (static_cast<int>(inst.rho0.size()) != inst.n || static_cast<int>(inst.rho.size()) != inst.n ||
      static_cast<int>(inst.costs.size()) != inst.n)
    throw std::invalid_argument("instance: field lengths do not match n");
  auto check_prob = [](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("instance: probabilities must be in [0,1]");
  };
  for (double p : inst.rho0) check_prob(p);
  for (int i = 0; i < inst.n; ++i) {
    if (static_cast<int>(inst.rho[i].size()) != i + 1)
      throw std::invalid_argument("instance: rho row " + std::to_string(i) + " must have " +
                                  std::to_string(i + 1) + " entries");
    for (double p : inst.rho[i]) check_prob(p);
  }
  for (const CostVector& c : inst.costs) {
    for (double v : {c.c_rob, c.c_hum, c.c_demo, c.c_fail})
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("instance: costs must be nonnegative and finite");
  }
}

double success_probability(const PlanInstance& inst, const std::vector<Action>& actions, int i) {
  double p = inst.rho0[i];
  for (int j = 0; j <= i; ++j)
    if (actions[j] == Action::learn) p = std::max(p, inst.rho[i][j]);
  return p;
}

double expected_plan_cost(const PlanInstance& inst, const std::vector<Action>& actions) {
  if (static_cast<int>(actions.size()) != inst.n)
    throw std::invalid_argument("expected_plan_cost: actions length does not match n");
  double total = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    const CostVector& c = inst.costs[i];
    switch (actions[i]) {
      case Action::delegate: total += c.c_hum; break;
      case Action::learn:
        total += c.c_demo;
        if (inst.mode == Mode::literal_paper)
          total += c.c_fail * (1.0 - success_probability(inst, actions, i));
        break;
      case Action::act: total += act_cost(c, success_probability(inst, actions, i)); break;
    }
  }
  return total;
}

double root_lower_bound(const PlanInstance& inst) {
  return bound_with_state(inst, std::vector<int8_t>(inst.n, 0));
}

Plan plan_exhaustive(const PlanInstance& inst) {
  validate_instance(inst);
  guard_oracle_size(inst, "plan_exhaustive");
  Timer timer;
  double best = kInf;
  std::vector<Action> best_actions;
  std::vector<Action> actions(inst.n);
  const uint32_t mask_end = 1u << inst.n;
  for (uint32_t mask = 0; mask < mask_end; ++mask) {
    for (int i = 0; i < inst.n; ++i) {
      if (mask & (1u << i)) {
        actions[i] = Action::learn;
        continue;
      }
      double p = inst.rho0[i];
      for (int j = 0; j < i; ++j)
        if (mask & (1u << j)) p = std::max(p, inst.rho[i][j]);
      actions[i] = act_cost(inst.costs[i], p) <= inst.costs[i].c_hum ? Action::act : Action::delegate;
    }
    const double cost = expected_plan_cost(inst, actions);
    if (cost < best || (cost == best && lex_preferred(actions, best_actions))) {
      best = cost;
      best_actions = actions;
    }
  }
  SolverMeta meta;
  meta.lower_bound = best;
  meta.nodes_expanded = static_cast<long>(mask_end);
  meta.wall_time_ms = timer.elapsed_ms();
  return finalize_plan(inst, std::move(best_actions), meta);
}

Plan plan_ssp_dp(const PlanInstance& inst, DpStats* stats) {
  validate_instance(inst);
  guard_oracle_size(inst, "plan_ssp_dp");
  Timer timer;
  std::unordered_map<uint64_t, double> memo;
  DpStats local;

  // Option costs for completing task k in state (k, demos-so-far mask).
  auto option_costs = [&](int k, uint32_t mask, double& act, double& del, double& learn) {
    const CostVector& c = inst.costs[k];
    double p = inst.rho0[k];
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) p = std::max(p, inst.rho[k][j]);
    act = act_cost(c, p);
    del = c.c_hum;
    learn = c.c_demo;
    if (inst.mode == Mode::literal_paper) learn += c.c_fail * (1.0 - std::max(p, inst.rho[k][k]));
  };

  auto key_of = [](int k, uint32_t mask) {
    return (static_cast<uint64_t>(k) << 32) | mask;
  };

  // Value of the cheapest completion of tasks k..n-1.
  std::function<double(int, uint32_t)> value = [&](int k, uint32_t mask) -> double {
    if (k == inst.n) return 0.0;
    const uint64_t key = key_of(k, mask);
    if (auto it = memo.find(key); it != memo.end()) {
      ++local.memo_hits;
      return it->second;
    }
    ++local.states;
    double act, del, learn;
    option_costs(k, mask, act, del, learn);
    const double v = std::min({act + value(k + 1, mask), del + value(k + 1, mask),
                               learn + value(k + 1, mask | (1u << k))});
    memo.emplace(key, v);
    return v;
  };

  const double optimal = value(0, 0);

  std::vector<Action> actions(inst.n);
  uint32_t mask = 0;
  for (int k = 0; k < inst.n; ++k) {
    double act, del, learn;
    option_costs(k, mask, act, del, learn);
    const double v_act = act + value(k + 1, mask);
    const double v_del = del + value(k + 1, mask);
    const double v_learn = learn + value(k + 1, mask | (1u << k));
    const double v = std::min({v_act, v_del, v_learn});
    if (v_act == v) {
      actions[k] = Action::act;
    } else if (v_del == v) {
      actions[k] = Action::delegate;
    } else {
      actions[k] = Action::learn;
      mask |= 1u << k;
    }
  }

  if (stats) *stats = local;
  SolverMeta meta;
  meta.lower_bound = optimal;
  meta.nodes_expanded = local.states;
  meta.wall_time_ms = timer.elapsed_ms();
  return finalize_plan(inst, std::move(actions), meta);
}

Plan plan_bnb(const PlanInstance& inst, double gap_tolerance) {
  validate_instance(inst);
  if (gap_tolerance < 0.0) throw std::invalid_argument("plan_bnb: gap_tolerance must be >= 0");
  Timer timer;
  BnbSearch search(inst, gap_tolerance);
  search.dfs(0, root_lower_bound(inst));
  SolverMeta meta;
  meta.lower_bound = std::min(search.incumbent, search.min_pruned_lb);
  meta.nodes_expanded = search.nodes;
  meta.wall_time_ms = timer.elapsed_ms();
  return finalize_plan(inst, std::move(search.incumbent_actions), meta);
}

Plan plan_greedy_facility(const PlanInstance& inst) {
  validate_instance(inst);
  Timer timer;
  std::vector<Action> actions(inst.n, Action::act);
  double current = expected_plan_cost(inst, actions);
  long opened = 0;
  for (;;) {
    double best_delta = 0.0;
    int best_task = -1;
    Action best_kind = Action::act;
    for (int i = 0; i < inst.n; ++i) {
      if (actions[i] != Action::act) continue;
      for (Action kind : {Action::delegate, Action::learn}) {
        actions[i] = kind;
        const double delta = expected_plan_cost(inst, actions) - current;
        actions[i] = Action::act;
        if (delta < best_delta) {
          best_delta = delta;
          best_task = i;
          best_kind = kind;
        }
      }
    }
    if (best_task < 0) break;
    actions[best_task] = best_kind;
    current += best_delta;
    ++opened;
  }
  SolverMeta meta;
  meta.lower_bound = root_lower_bound(inst);
  meta.nodes_expanded = opened;
  meta.wall_time_ms = timer.elapsed_ms();
  return finalize_plan(inst, std::move(actions), meta);
}

std::string instance_to_json(const PlanInstance& inst) {
  json o;
  o["n"] = inst.n;
  o["rho0"] = inst.rho0;
  json rho = json::array();
  for (int i = 0; i < inst.n; ++i) {
    json row = json::array();
    for (int j = 0; j < inst.n; ++j) {
      if (j <= i)
        row.push_back(inst.rho[i][j]);
      else
        row.push_back(nullptr);
    }
    rho.push_back(std::move(row));
  }
  o["rho"] = rho;
  json costs = json::array();
  for (const CostVector& c : inst.costs)
    costs.push_back({{"c_rob", c.c_rob}, {"c_hum", c.c_hum}, {"c_demo", c.c_demo}, {"c_fail", c.c_fail}});
  o["costs"] = costs;
  o["mode"] = mode_to_string(inst.mode);
  return o.dump(2) + "\n";
}

PlanInstance instance_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("instance: malformed JSON: ") + e.what());
  }
  PlanInstance inst;
  inst.n = o.at("n").get<int>();
  inst.rho0 = o.at("rho0").get<std::vector<double>>();
  for (const auto& row : o.at("rho")) {
    std::vector<double> r;
    for (const auto& v : row) {
      if (v.is_null()) break;
      r.push_back(v.get<double>());
    }
    inst.rho.push_back(std::move(r));
  }
  for (const auto& c : o.at("costs")) {
    inst.costs.push_back({c.at("c_rob").get<double>(), c.at("c_hum").get<double>(),
                          c.at("c_demo").get<double>(), c.at("c_fail").get<double>()});
  }
  inst.mode = mode_from_string(o.at("mode").get<std::string>());
  validate_instance(inst);
  return inst;
}

void save_instance(const PlanInstance& inst, const std::string& path) {
  write_file(path, instance_to_json(inst));
}

PlanInstance load_instance(const std::string& path) {
  return instance_from_json(read_file(path));
}

std::string plan_to_json(const Plan& plan) {
  json o;
  json actions = json::array();
  for (Action a : plan.actions) actions.push_back(action_to_string(a));
  o["actions"] = actions;
  json serving = json::array();
  for (const Serving& s : plan.serving) append_serving_json(serving, s);
  o["serving"] = serving;
  o["objective"] = plan.objective;
  o["lower_bound"] = plan.meta.lower_bound;
  o["gap"] = plan.meta.gap;
  o["nodes"] = plan.meta.nodes_expanded;
  o["wall_time_ms"] = plan.meta.wall_time_ms;
  return o.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("plan: malformed JSON: ") + e.what());
  }
  Plan plan;
  for (const auto& a : o.at("actions")) plan.actions.push_back(action_from_string(a.get<std::string>()));
  for (const auto& s : o.at("serving")) {
    Serving serving;
    if (s.is_null()) {
      serving.source = Serving::Source::none;
    } else if (s.is_string()) {
      if (s.get<std::string>() != "pretrained") throw std::runtime_error("plan: unknown serving entry");
      serving.source = Serving::Source::pretrained;
    } else {
      serving.source = Serving::Source::learned;
      serving.learned_from = s.get<int>();
    }
    plan.serving.push_back(serving);
  }
  plan.objective = o.at("objective").get<double>();
  plan.meta.lower_bound = o.at("lower_bound").get<double>();
  plan.meta.gap = o.at("gap").get<double>();
  plan.meta.nodes_expanded = o.at("nodes").get<long>();
  plan.meta.wall_time_ms = o.at("wall_time_ms").get<double>();
  return plan;
}

void save_plan(const Plan& plan, const std::string& path) {
  write_file(path, plan_to_json(plan));
}

Plan load_plan(const std::string& path) {
  return plan_from_json(read_file(path));
}

}  // namespace adl
