#pragma once

#include <string>

#include "adl/planner.hpp"

namespace adl {

// Writes the linearized planning MIP in CPLEX LP text format.
//
// Variables (tasks 1-indexed to match the written names):
//   x_i, y_i         binary: demo sought / delegated (acting = neither)
//   u_i_0            assignment weight of task i to the pretrained library
//   u_i_j (j < i)    assignment weight of task i to a demo on task j
//   w_i              probability of a failure intervention on task i
// Constraints per task:
//   onehot_i:  x_i + y_i <= 1
//   cover_i:   u_i_0 + sum_j u_i_j <= 1
//   avail_i_j: u_i_j <= x_j
//   fail_i:    w_i >= 1 - x_i - y_i - m_i                 (mdp_consistent)
//              w_i >= 1 - y_i - rho_ii x_i - m_i          (literal_paper)
//   where m_i = rho0_i u_i_0 + sum_j rho_ij u_i_j is written inline.
// Objective: sum c_demo'(i) x_i + c_hum'(i) y_i + c_fail(i) w_i plus the
// constant sum c_rob(i), with c' costs net of c_rob.
std::string lp_text(const PlanInstance& instance);

void export_mip(const PlanInstance& instance, const std::string& path);

}  // namespace adl
