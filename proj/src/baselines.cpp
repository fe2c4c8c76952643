#include "adl/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "adl/rng.hpp"

namespace adl {

namespace {

Plan baseline_plan(const PlanInstance& inst, std::vector<Action> actions) {
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
  plan.meta.lower_bound = root_lower_bound(inst);
  plan.meta.gap =
      plan.objective > 1e-300 ? std::max(0.0, (plan.objective - plan.meta.lower_bound) / plan.objective) : 0.0;
  plan.meta.nodes_expanded = inst.n;
  return plan;
}

}  // namespace

Plan plan_ad(const PlanInstance& inst) {
  validate_instance(inst);
  std::vector<Action> actions(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const CostVector& c = inst.costs[i];
    const double act = c.c_rob + (1.0 - inst.rho0[i]) * c.c_fail;
    actions[i] = act <= c.c_hum ? Action::act : Action::delegate;
  }
  return baseline_plan(inst, std::move(actions));
}

Plan plan_cba(const PlanInstance& inst, const CbaConfig& cfg) {
  validate_instance(inst);
  if (cfg.theta < 0.0 || cfg.theta > 1.0) throw std::invalid_argument("plan_cba: theta must be in [0,1]");
  std::vector<Action> actions(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    double p = inst.rho0[i];
    for (int j = 0; j < i; ++j)
      if (actions[j] == Action::learn) p = std::max(p, inst.rho[i][j]);
    actions[i] = p > cfg.theta ? Action::act : Action::learn;
  }
  return baseline_plan(inst, std::move(actions));
}

Plan plan_alm(const PlanInstance& inst) {
  validate_instance(inst);
  std::vector<Action> actions(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const CostVector& c = inst.costs[i];
    double p = inst.rho0[i];
    for (int j = 0; j < i; ++j)
      if (actions[j] == Action::learn) p = std::max(p, inst.rho[i][j]);
    const double act = c.c_rob + (1.0 - p) * c.c_fail;
    actions[i] = act <= c.c_demo ? Action::act : Action::learn;
  }
  return baseline_plan(inst, std::move(actions));
}

std::vector<ExecutionTrace> simulate_execution(const PlanInstance& inst, const Plan& plan, int trials,
                                               uint64_t seed, ExecSummary* summary) {
  validate_instance(inst);
  if (trials < 1) throw std::invalid_argument("simulate_execution: trials must be >= 1");
  if (static_cast<int>(plan.actions.size()) != inst.n)
    throw std::invalid_argument("simulate_execution: plan length does not match instance");

  std::vector<ExecutionTrace> traces;
  traces.reserve(trials);
  double sum = 0.0, sum_sq = 0.0;
  long failures_total = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(substream(seed, static_cast<uint64_t>(t)));
    ExecutionTrace trace;
    trace.seed = seed;
    trace.actions = plan.actions;
    trace.success.resize(inst.n, 1);
    trace.realized.resize(inst.n, 0.0);
    for (int i = 0; i < inst.n; ++i) {
      const CostVector& c = inst.costs[i];
      switch (plan.actions[i]) {
        case Action::delegate: trace.realized[i] = c.c_hum; break;
        case Action::learn: {
          trace.realized[i] = c.c_demo;
          if (inst.mode == Mode::literal_paper) {
            const double p = success_probability(inst, plan.actions, i);
            if (rng.uniform() >= p) {
              trace.success[i] = 0;
              trace.realized[i] += c.c_fail;
            }
          }
          break;
        }
        case Action::act: {
          const double p = success_probability(inst, plan.actions, i);
          trace.realized[i] = c.c_rob;
          if (rng.uniform() >= p) {
            trace.success[i] = 0;
            trace.realized[i] += c.c_fail;
          }
          break;
        }
      }
      trace.total += trace.realized[i];
      failures_total += trace.success[i] ? 0 : 1;
    }
    sum += trace.total;
    sum_sq += trace.total * trace.total;
    traces.push_back(std::move(trace));
  }

  if (summary) {
    summary->trials = trials;
    summary->mean_cost = sum / trials;
    const double var = trials > 1 ? std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1)) : 0.0;
    summary->stddev_cost = std::sqrt(var);
    summary->demos = static_cast<int>(std::count(plan.actions.begin(), plan.actions.end(), Action::learn));
    summary->delegations =
        static_cast<int>(std::count(plan.actions.begin(), plan.actions.end(), Action::delegate));
    summary->mean_failures = static_cast<double>(failures_total) / trials;
    summary->mean_interventions = summary->mean_failures;
  }
  return traces;
}

}  // namespace adl
