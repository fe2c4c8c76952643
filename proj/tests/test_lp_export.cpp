#include <cmath>
#include <set>

#include "adl/lp_export.hpp"
#include "adl/planner.hpp"
#include "adl/rng.hpp"
#include "doctest.h"
#include "lp_grammar.hpp"

using namespace adl;

namespace {

PlanInstance random_instance(Rng& rng, int n, Mode mode) {
  PlanInstance inst;
  inst.n = n;
  inst.mode = mode;
  for (int i = 0; i < n; ++i) {
    inst.rho0.push_back(rng.uniform());
    inst.rho.emplace_back();
    for (int j = 0; j <= i; ++j) inst.rho.back().push_back(rng.uniform());
    inst.costs.push_back(CostVector{});
  }
  return inst;
}

}  // namespace

TEST_CASE("a single-task export has two binaries and two continuous variables") {
  PlanInstance inst;
  inst.n = 1;
  inst.rho0 = {0.5};
  inst.rho = {{0.7}};
  inst.costs = {CostVector{}};
  const lp_test::Program prog = lp_test::parse(lp_text(inst));
  CHECK(prog.binaries == std::set<std::string>{"x_1", "y_1"});
  REQUIRE(prog.bounds.size() == 2);
  CHECK(prog.bounds.count("w_1") == 1);
  CHECK(prog.bounds.count("u_1_0") == 1);
  CHECK(prog.objective_constant == 10.0);
}

TEST_CASE("exports parse under the LP grammar for both modes and re-export identically") {
  Rng rng(606);
  for (Mode mode : {Mode::mdp_consistent, Mode::literal_paper}) {
    const PlanInstance inst = random_instance(rng, 5, mode);
    const std::string text = lp_text(inst);
    CHECK(text == lp_text(inst));
    const lp_test::Program prog = lp_test::parse(text);
    CHECK(prog.binaries.size() == 10);
    // one onehot, one cover and one fail row per task plus one avail row per (i, j<i) pair
    CHECK(prog.constraints.size() == 3 * 5 + 10);
    for (const auto& con : prog.constraints) CHECK(!con.terms.empty());
  }
}

TEST_CASE("mdp mode neutralizes taught tasks via x_i while literal mode keeps rho_ii") {
  PlanInstance inst;
  inst.n = 2;
  inst.rho0 = {0.25, 0.0};
  inst.rho = {{0.875}, {0.5, 0.125}};
  inst.costs = {CostVector{}, CostVector{}};

  const lp_test::Program mdp = lp_test::parse(lp_text(inst));
  inst.mode = Mode::literal_paper;
  const lp_test::Program literal = lp_test::parse(lp_text(inst));

  auto fail_x_coef = [](const lp_test::Program& prog, const std::string& con_name,
                        const std::string& var) {
    for (const auto& con : prog.constraints)
      if (con.name == con_name)
        for (const auto& term : con.terms)
          if (term.var == var) return term.coef;
    return 0.0;
  };
  CHECK(fail_x_coef(mdp, "fail_1", "x_1") == 1.0);
  CHECK(fail_x_coef(literal, "fail_1", "x_1") == 0.875);
  CHECK(fail_x_coef(mdp, "fail_2", "x_2") == 1.0);
  CHECK(fail_x_coef(literal, "fail_2", "x_2") == 0.125);
  CHECK(fail_x_coef(mdp, "fail_2", "u_2_1") == 0.5);
}

TEST_CASE("optimizing the exported mdp file reproduces the planner optimum") {
  Rng rng(4040);
  for (int round = 0; round < 20; ++round) {
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 4));
    PlanInstance inst = random_instance(rng, n, Mode::mdp_consistent);
    if (round % 3 == 0) {
      for (CostVector& c : inst.costs) {
        c.c_rob = rng.uniform(0.0, 50.0);
        c.c_hum = rng.uniform(0.0, 200.0);
        c.c_demo = rng.uniform(0.0, 300.0);
        c.c_fail = rng.uniform(0.0, 200.0);
      }
    }
    const lp_test::Program prog = lp_test::parse(lp_text(inst));
    const double mip_opt = lp_test::optimize(prog, n);
    const double plan_opt = plan_exhaustive(inst).objective;
    CHECK(std::abs(mip_opt - plan_opt) < 1e-9);
  }
}

TEST_CASE("the LP grammar checker rejects malformed files") {
  CHECK_THROWS(lp_test::parse("Maximize\n obj: x\nEnd\n"));
  CHECK_THROWS(lp_test::parse("Minimize\n obj: 1 x_1\nSubject To\n c1: x_1 <=\nBounds\nEnd\n"));
  CHECK_THROWS(lp_test::parse("Minimize\n obj: 1 x_1\nSubject To\n"));
}
