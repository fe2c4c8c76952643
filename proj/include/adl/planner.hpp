#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adl/precond_model.hpp"
#include "adl/task.hpp"

namespace adl {

// Cost semantics for a taught task. mdp_consistent charges a demo
// exactly c_demo; literal_paper additionally charges the residual
// expected failure cost on taught tasks (the objective's max keeps the
// taught task's own success probability inside it).
enum class Mode { mdp_consistent, literal_paper };

std::string mode_to_string(Mode mode);
Mode mode_from_string(const std::string& text);

// Complete planner input for a fixed task sequence. rho[i][j] is the
// predicted success probability on task i of a skill learned on task j,
// defined for j <= i (demos only serve the task they are taken on and
// later tasks); rho0[i] is the best pretrained success probability.
struct PlanInstance {
  int n = 0;
  std::vector<double> rho0;
  std::vector<std::vector<double>> rho;  // row i holds entries j = 0..i
  std::vector<CostVector> costs;
  Mode mode = Mode::mdp_consistent;
};

enum class Action { act, delegate, learn };

std::string action_to_string(Action a);
Action action_from_string(const std::string& text);

// Which skill an autonomously executed task relies on.
struct Serving {
  enum class Source { none, pretrained, learned };
  Source source = Source::none;
  int learned_from = -1;  // task index, valid when source == learned
};

struct SolverMeta {
  double lower_bound = 0.0;
  double gap = 0.0;  // (objective - lower_bound) / objective, floored at 0
  long nodes_expanded = 0;
  double wall_time_ms = 0.0;
};

struct Plan {
  std::vector<Action> actions;
  std::vector<Serving> serving;
  double objective = 0.0;
  SolverMeta meta;
};

// rho0[i] = best pretrained-skill prediction for task i (0 for an empty
// library); rho[i][j] = predicted transfer from a demo on task j.
PlanInstance build_instance(const std::vector<Task>& tasks, const SkillLibrary& library,
                            const PreconditionModel& model, Mode mode);

void validate_instance(const PlanInstance& instance);

// Expected total cost J of executing the given action sequence.
double expected_plan_cost(const PlanInstance& instance, const std::vector<Action>& actions);

// Best available success probability for task i under the demo choices
// in `actions` (pretrained skills plus demos taken at or before i).
double success_probability(const PlanInstance& instance, const std::vector<Action>& actions, int i);

// Admissible bound assuming every demo is available free of charge.
double root_lower_bound(const PlanInstance& instance);

// Brute-force oracle over all demo subsets. Guarded to n <= 20.
Plan plan_exhaustive(const PlanInstance& instance);

struct DpStats {
  long states = 0;
  long memo_hits = 0;
};

// Dynamic program over (tasks completed, demos acquired so far).
// Guarded to n <= 20; agrees with plan_exhaustive.
Plan plan_ssp_dp(const PlanInstance& instance, DpStats* stats = nullptr);

// Depth-first branch and bound on the demo variables; the bound treats
// every undecided demo as available free of charge. gap_tolerance is the
// accepted relative suboptimality (0 = exact).
Plan plan_bnb(const PlanInstance& instance, double gap_tolerance = 0.0);

// Greedy facility-location approximation: facilities are demos and
// delegations; repeatedly opens the facility with the largest net
// objective decrease. Always feasible, no optimality guarantee.
Plan plan_greedy_facility(const PlanInstance& instance);

std::string instance_to_json(const PlanInstance& instance);
PlanInstance instance_from_json(const std::string& text);
void save_instance(const PlanInstance& instance, const std::string& path);
PlanInstance load_instance(const std::string& path);

std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);
void save_plan(const Plan& plan, const std::string& path);
Plan load_plan(const std::string& path);

}  // namespace adl
