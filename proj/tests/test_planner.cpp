#include <cmath>

#include "adl/planner.hpp"
#include "adl/precond_model.hpp"
#include "adl/rng.hpp"
#include "adl/task_gen.hpp"
#include "doctest.h"

using namespace adl;

namespace {

PlanInstance make_instance(std::vector<double> rho0, std::vector<std::vector<double>> rho,
                           std::vector<CostVector> costs, Mode mode = Mode::mdp_consistent) {
  PlanInstance inst;
  inst.n = static_cast<int>(rho0.size());
  inst.rho0 = std::move(rho0);
  inst.rho = std::move(rho);
  inst.costs = std::move(costs);
  inst.mode = mode;
  return inst;
}

PlanInstance uniform_instance(int n, double rho0_value, double rho_value,
                              CostVector costs = CostVector{}, Mode mode = Mode::mdp_consistent) {
  std::vector<double> rho0(n, rho0_value);
  std::vector<std::vector<double>> rho(n);
  for (int i = 0; i < n; ++i) rho[i].assign(i + 1, rho_value);
  return make_instance(std::move(rho0), std::move(rho), std::vector<CostVector>(n, costs), mode);
}

PlanInstance random_instance(Rng& rng, int n, Mode mode, bool random_costs) {
  PlanInstance inst;
  inst.n = n;
  inst.mode = mode;
  for (int i = 0; i < n; ++i) {
    inst.rho0.push_back(rng.uniform());
    inst.rho.emplace_back();
    for (int j = 0; j <= i; ++j) inst.rho.back().push_back(rng.uniform());
    CostVector c;
    if (random_costs) {
      c.c_rob = rng.uniform(0.0, 50.0);
      c.c_hum = rng.uniform(0.0, 200.0);
      c.c_demo = rng.uniform(0.0, 300.0);
      c.c_fail = rng.uniform(0.0, 200.0);
    }
    inst.costs.push_back(c);
  }
  return inst;
}

const std::vector<Action> kAllActions{Action::act, Action::delegate, Action::learn};

}  // namespace

TEST_CASE("expected_plan_cost hand-arithmetic oracles") {
  // single task, certain success: only the robot cost
  auto inst = make_instance({1.0}, {{0.5}}, {CostVector{10, 100, 200, 100}});
  CHECK(expected_plan_cost(inst, {Action::act}) == 10.0);

  // single task, certain failure: robot cost plus the full failure cost
  inst = make_instance({0.0}, {{0.5}}, {CostVector{10, 100, 200, 100}});
  CHECK(expected_plan_cost(inst, {Action::act}) == 110.0);

  // learn then act through the learned skill
  inst = make_instance({0.0, 0.0}, {{0.9}, {0.95, 0.5}},
                       {CostVector{10, 100, 200, 100}, CostVector{10, 100, 200, 100}});
  CHECK(expected_plan_cost(inst, {Action::learn, Action::act}) == doctest::Approx(215.0).epsilon(1e-12));

  // literal mode also charges the residual failure risk on the taught task
  inst.mode = Mode::literal_paper;
  CHECK(expected_plan_cost(inst, {Action::learn, Action::act}) == doctest::Approx(225.0).epsilon(1e-12));

  // delegation carries no failure term in either mode
  CHECK(expected_plan_cost(inst, {Action::delegate, Action::delegate}) == 200.0);
}

TEST_CASE("build_instance: empty library gives zero pretrained probabilities") {
  const auto tasks = generate_grid_part_tasks(5, 3, 2);
  PreconditionModel model;
  model.input_dim = 132;
  model.hidden_dim = 2;
  model.w1.assign(2 * 132, 0.0);
  model.b1.assign(2, 0.0);
  model.w2.assign(2, 0.0);
  model.norm_mean.assign(132, 0.0);
  model.norm_scale.assign(132, 1.0);

  const PlanInstance inst = build_instance(tasks, SkillLibrary{}, model, Mode::mdp_consistent);
  for (double p : inst.rho0) CHECK(p == 0.0);
  // zero model predicts 0.5 for every pair
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j <= i; ++j) CHECK(inst.rho[i][j] == 0.5);

  // a library skill trained on task i itself yields rho0[i] = predict(i, i)
  SkillLibrary lib;
  Skill s;
  s.trained_on = tasks[2].id;
  s.trained_features = tasks[2].features;
  s.taps.push_back({0.5, 0.5});
  lib.skills.push_back(s);
  lib.provenance.push_back(s.trained_on);
  const PlanInstance with_skill = build_instance(tasks, lib, model, Mode::mdp_consistent);
  CHECK(with_skill.rho0[2] == predict(model, tasks[2], tasks[2]));

  // growing the library never decreases rho0
  SkillLibrary bigger = lib;
  Skill s2 = s;
  s2.trained_on = tasks[0].id;
  s2.trained_features = tasks[0].features;
  bigger.skills.push_back(s2);
  bigger.provenance.push_back(s2.trained_on);
  const PlanInstance grown = build_instance(tasks, bigger, model, Mode::mdp_consistent);
  for (int i = 0; i < inst.n; ++i) CHECK(grown.rho0[i] >= with_skill.rho0[i]);
}

TEST_CASE("plan_exhaustive: dominance corner cases") {
  // everything autonomous when pretrained skills are certain
  auto inst = uniform_instance(6, 1.0, 0.0);
  Plan plan = plan_exhaustive(inst);
  for (Action a : plan.actions) CHECK(a == Action::act);
  CHECK(plan.objective == 60.0);

  // delegation dominates when learning is hopeless and demos are overpriced
  inst = uniform_instance(4, 0.0, 0.0, CostVector{10, 100, 100.0 * 10 * 4, 100});
  plan = plan_exhaustive(inst);
  for (Action a : plan.actions) CHECK(a == Action::delegate);
  CHECK(plan.objective == 400.0);
}

TEST_CASE("plan_exhaustive: one demo serving four downstream tasks") {
  std::vector<std::vector<double>> rho(5);
  for (int i = 0; i < 5; ++i) {
    rho[i].assign(i + 1, 0.0);
    if (i >= 1) rho[i][0] = 0.99;
  }
  const auto inst = make_instance(std::vector<double>(5, 0.0), std::move(rho),
                                  std::vector<CostVector>(5, CostVector{10, 100, 200, 100}));
  const Plan plan = plan_exhaustive(inst);
  CHECK(plan.actions[0] == Action::learn);
  for (int i = 1; i < 5; ++i) CHECK(plan.actions[i] == Action::act);
  CHECK(plan.objective == doctest::Approx(244.0).epsilon(1e-12));
  CHECK(plan.meta.nodes_expanded == 32);
}

TEST_CASE("plan_exhaustive refuses oversized instances with guidance") {
  const auto inst = uniform_instance(21, 0.5, 0.5);
  CHECK_THROWS_WITH_AS(plan_exhaustive(inst), doctest::Contains("plan_bnb"), std::invalid_argument);
  CHECK_THROWS_AS(plan_ssp_dp(inst), std::invalid_argument);
}

TEST_CASE("oracle triangle: exhaustive, DP and exact branch-and-bound agree") {
  Rng rng(12345);
  for (int round = 0; round < 60; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 6));
    const Mode mode = round % 2 ? Mode::literal_paper : Mode::mdp_consistent;
    const PlanInstance inst = random_instance(rng, n, mode, round % 5 == 0);
    const Plan ex = plan_exhaustive(inst);
    const Plan dp = plan_ssp_dp(inst);
    const Plan bb = plan_bnb(inst, 0.0);
    CHECK(std::abs(ex.objective - dp.objective) < 1e-9);
    CHECK(std::abs(ex.objective - bb.objective) < 1e-9);
  }
}

TEST_CASE("plan_ssp_dp: a single-task instance reduces to the cheapest action") {
  const auto inst = make_instance({0.4}, {{0.7}}, {CostVector{10, 50, 30, 100}});
  const Plan plan = plan_ssp_dp(inst);
  CHECK(plan.objective == 30.0);  // act = 70, delegate = 50, learn = 30
  CHECK(plan.actions[0] == Action::learn);
}

TEST_CASE("plan_ssp_dp records memoization hits once demo decisions interleave") {
  Rng rng(5);
  const PlanInstance inst = random_instance(rng, 4, Mode::mdp_consistent, false);
  DpStats stats;
  plan_ssp_dp(inst, &stats);
  CHECK(stats.memo_hits > 0);
}

TEST_CASE("plan_bnb: no-demo-helps instances close at the root dive") {
  const auto inst = uniform_instance(8, 0.3, 0.0);
  const Plan plan = plan_bnb(inst, 0.0);
  CHECK(plan.meta.nodes_expanded <= 9);
  CHECK(plan.objective == doctest::Approx(plan.meta.lower_bound));
}

TEST_CASE("plan_bnb: lower bound is admissible and gap tolerance is honored") {
  Rng rng(777);
  for (int round = 0; round < 40; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 7));
    const PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent, round % 3 == 0);
    const Plan exact = plan_exhaustive(inst);
    for (double gap : {0.0, 0.1, 0.5}) {
      const Plan plan = plan_bnb(inst, gap);
      CHECK(plan.meta.lower_bound <= plan.objective + 1e-9);
      CHECK(plan.objective <= (1.0 + gap) * exact.objective + 1e-9);
    }
  }
}

TEST_CASE("plan_greedy_facility: feasibility and corner cases") {
  // all pretrained certainties: opens nothing
  auto inst = uniform_instance(5, 1.0, 0.2);
  Plan plan = plan_greedy_facility(inst);
  for (Action a : plan.actions) CHECK(a == Action::act);

  Rng rng(31);
  for (int round = 0; round < 40; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 6));
    const PlanInstance random = random_instance(rng, n, Mode::mdp_consistent, round % 4 == 0);
    const Plan greedy = plan_greedy_facility(random);
    const Plan exact = plan_exhaustive(random);
    CHECK(greedy.objective >= exact.objective - 1e-9);
    CHECK(greedy.actions.size() == static_cast<size_t>(n));
    CHECK(greedy.objective == doctest::Approx(expected_plan_cost(random, greedy.actions)));
  }
}

TEST_CASE("library monotonicity: raising rho0 never raises the optimal objective") {
  Rng rng(99);
  for (int round = 0; round < 25; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 5));
    PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent, false);
    const double before = plan_exhaustive(inst).objective;
    for (double& p : inst.rho0) p = std::min(1.0, p + rng.uniform(0.0, 0.5));
    const double after = plan_exhaustive(inst).objective;
    CHECK(after <= before + 1e-12);
  }
}

TEST_CASE("cost scaling by a power of two scales the objective exactly and keeps the plan") {
  Rng rng(4242);
  for (int round = 0; round < 20; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 5));
    PlanInstance inst = random_instance(rng, n, round % 2 ? Mode::literal_paper : Mode::mdp_consistent,
                                        round % 2 == 0);
    const Plan base = plan_exhaustive(inst);
    for (CostVector& c : inst.costs) {
      c.c_rob *= 2.0;
      c.c_hum *= 2.0;
      c.c_demo *= 2.0;
      c.c_fail *= 2.0;
    }
    const Plan scaled = plan_exhaustive(inst);
    CHECK(scaled.objective == 2.0 * base.objective);
    CHECK(scaled.actions == base.actions);
  }
}

TEST_CASE("structural causality: learned attributions always point backwards to demo tasks") {
  Rng rng(2718);
  for (int round = 0; round < 20; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 6));
    const PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent, false);
    for (const Plan& plan : {plan_exhaustive(inst), plan_bnb(inst, 0.0), plan_greedy_facility(inst)}) {
      for (int i = 0; i < n; ++i) {
        if (plan.serving[i].source != Serving::Source::learned) continue;
        const int j = plan.serving[i].learned_from;
        CHECK(j <= i);
        CHECK(plan.actions[j] == Action::learn);
      }
    }
  }
}

TEST_CASE("the optimum never exceeds the all-delegate or all-act plans") {
  Rng rng(1618);
  for (int round = 0; round < 25; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 6));
    const PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent, true);
    const double opt = plan_exhaustive(inst).objective;
    CHECK(opt <= expected_plan_cost(inst, std::vector<Action>(n, Action::delegate)) + 1e-9);
    CHECK(opt <= expected_plan_cost(inst, std::vector<Action>(n, Action::act)) + 1e-9);
  }
}

TEST_CASE("mdp_consistent optimum is never above the literal_paper optimum") {
  Rng rng(333);
  for (int round = 0; round < 20; ++round) {
    const int n = 3 + static_cast<int>(rng.uniform_int(0, 5));
    PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent, false);
    const double mdp = plan_exhaustive(inst).objective;
    inst.mode = Mode::literal_paper;
    const double literal = plan_exhaustive(inst).objective;
    CHECK(mdp <= literal + 1e-12);
  }
}

TEST_CASE("every action sequence costs at least the exhaustive optimum") {
  Rng rng(555);
  const PlanInstance inst = random_instance(rng, 5, Mode::mdp_consistent, false);
  const double opt = plan_exhaustive(inst).objective;
  std::vector<Action> actions(5);
  for (int a0 = 0; a0 < 3; ++a0)
    for (int a1 = 0; a1 < 3; ++a1)
      for (int a2 = 0; a2 < 3; ++a2)
        for (int a3 = 0; a3 < 3; ++a3)
          for (int a4 = 0; a4 < 3; ++a4) {
            actions = {kAllActions[a0], kAllActions[a1], kAllActions[a2], kAllActions[a3],
                       kAllActions[a4]};
            CHECK(expected_plan_cost(inst, actions) >= opt - 1e-9);
          }
}

TEST_CASE("instance JSON round-trips byte-identically and validates") {
  Rng rng(808);
  const PlanInstance inst = random_instance(rng, 6, Mode::literal_paper, true);
  const std::string first = instance_to_json(inst);
  const std::string second = instance_to_json(instance_from_json(first));
  CHECK(first == second);

  PlanInstance bad = inst;
  bad.rho0[0] = 1.5;
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.rho[3].pop_back();
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.costs[0].c_demo = -1.0;
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
}

TEST_CASE("plan JSON round-trips byte-identically") {
  Rng rng(909);
  const PlanInstance inst = random_instance(rng, 5, Mode::mdp_consistent, false);
  const Plan plan = plan_bnb(inst, 0.0);
  const std::string first = plan_to_json(plan);
  const std::string second = plan_to_json(plan_from_json(first));
  CHECK(first == second);
}
