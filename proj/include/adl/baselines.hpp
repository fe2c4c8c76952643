#pragma once

#include <cstdint>
#include <vector>

#include "adl/planner.hpp"

namespace adl {

struct CbaConfig {
  double theta = 0.5;  // confidence threshold in [0,1]
};

// Act Delegate: per task, the cheaper of acting (with pretrained skills
// only) and delegating. Never learns.
Plan plan_ad(const PlanInstance& instance);

// Confidence-Based Autonomy: acts when the running success confidence
// exceeds theta (strictly), otherwise asks for a demo. Never delegates.
Plan plan_cba(const PlanInstance& instance, const CbaConfig& cfg);

// Act-Learn Myopic: per task, the cheaper of acting now and asking for a
// demo now; acquired demos serve later tasks. Never delegates.
Plan plan_alm(const PlanInstance& instance);

// One stochastic execution of a plan: act outcomes are independent
// Bernoulli draws at the plan's success probabilities.
struct ExecutionTrace {
  std::vector<Action> actions;
  std::vector<uint8_t> success;   // per task
  std::vector<double> realized;   // per-task realized cost
  double total = 0.0;
  uint64_t seed = 0;
};

struct ExecSummary {
  int trials = 0;
  double mean_cost = 0.0;
  double stddev_cost = 0.0;  // sample standard deviation
  int demos = 0;
  int delegations = 0;
  double mean_failures = 0.0;
  double mean_interventions = 0.0;  // human fix-ups after failed attempts
};

std::vector<ExecutionTrace> simulate_execution(const PlanInstance& instance, const Plan& plan, int trials,
                                               uint64_t seed, ExecSummary* summary = nullptr);

}  // namespace adl
