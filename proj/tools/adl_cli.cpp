#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "adl/baselines.hpp"
#include "adl/bench.hpp"
#include "adl/coverage_sim.hpp"
#include "adl/lp_export.hpp"
#include "adl/planner.hpp"
#include "adl/precond_model.hpp"
#include "adl/rng.hpp"
#include "adl/task.hpp"
#include "adl/task_gen.hpp"

namespace {

struct GlobalArgs {
  uint64_t seed = 0;
  std::string mode = "mdp";
  std::string out;
};

struct InstanceArgs {
  std::string instance_path;
  std::string tasks_path;
  std::string model_path;
  std::string library_path;
};

void add_instance_options(CLI::App* cmd, InstanceArgs& args) {
  cmd->add_option("--instance", args.instance_path, "planner instance JSON");
  cmd->add_option("--tasks", args.tasks_path, "task-set JSON");
  cmd->add_option("--model", args.model_path, "precondition model JSON");
  cmd->add_option("--library", args.library_path, "pretrained skill-library JSON");
}

adl::PlanInstance make_instance(const InstanceArgs& args, adl::Mode mode) {
  if (!args.instance_path.empty()) return adl::load_instance(args.instance_path);
  if (args.tasks_path.empty() || args.model_path.empty())
    throw std::runtime_error("provide either --instance or both --tasks and --model");
  const auto tasks = adl::load_tasks(args.tasks_path);
  const auto model = adl::load_model(args.model_path);
  adl::SkillLibrary library;
  if (!args.library_path.empty()) library = adl::load_library(args.library_path);
  return adl::build_instance(tasks, library, model, mode);
}

void print_plan_table(const adl::PlanInstance& inst, const adl::Plan& plan) {
  std::printf("%-6s %-10s %-8s %-12s %s\n", "task", "action", "p", "exp_cost", "serving");
  for (int i = 0; i < inst.n; ++i) {
    const adl::CostVector& c = inst.costs[i];
    const double p = adl::success_probability(inst, plan.actions, i);
    double contribution = 0.0;
    switch (plan.actions[i]) {
      case adl::Action::delegate: contribution = c.c_hum; break;
      case adl::Action::learn:
        contribution = c.c_demo;
        if (inst.mode == adl::Mode::literal_paper) contribution += c.c_fail * (1.0 - p);
        break;
      case adl::Action::act: contribution = c.c_rob + (1.0 - p) * c.c_fail; break;
    }
    std::string serving = "-";
    if (plan.serving[i].source == adl::Serving::Source::pretrained) serving = "pretrained";
    if (plan.serving[i].source == adl::Serving::Source::learned)
      serving = "task " + std::to_string(plan.serving[i].learned_from);
    std::printf("%-6d %-10s %-8.4f %-12.4f %s\n", i, adl::action_to_string(plan.actions[i]).c_str(), p,
                contribution, serving.c_str());
  }
  std::printf("objective=%.6f lower_bound=%.6f gap=%.6f nodes=%ld wall_time_ms=%.3f\n", plan.objective,
              plan.meta.lower_bound, plan.meta.gap, plan.meta.nodes_expanded, plan.meta.wall_time_ms);
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"act-delegate-learn planner and learning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalArgs global;
  app.add_option("--seed", global.seed, "root random seed");
  app.add_option("--mode", global.mode, "cost semantics: mdp | literal")
      ->check(CLI::IsMember({"mdp", "literal", "mdp_consistent", "literal_paper"}));
  app.add_option("--out,-o", global.out, "output path");

  // gen-tasks
  auto* gen = app.add_subcommand("gen-tasks", "generate a task set and write it as JSON");
  std::string gen_domain;
  int gen_count = 0, gen_families = 15, gen_envs = 4;
  adl::CostVector gen_costs;
  gen->add_option("--domain", gen_domain, "grid_part | block")
      ->required()
      ->check(CLI::IsMember({"grid_part", "block"}));
  gen->add_option("--count", gen_count, "number of tasks")->required();
  gen->add_option("--families", gen_families, "shape families (grid_part)");
  gen->add_option("--envs", gen_envs, "environments (block)");
  gen->add_option("--c-rob", gen_costs.c_rob, "robot execution cost");
  gen->add_option("--c-hum", gen_costs.c_hum, "delegation cost");
  gen->add_option("--c-demo", gen_costs.c_demo, "demonstration cost");
  gen->add_option("--c-fail", gen_costs.c_fail, "failure intervention cost");

  // train-preconds
  auto* tp = app.add_subcommand("train-preconds", "generate coverage data and train the precondition model");
  std::string tp_tasks, tp_dataset_out = "dataset.csv", tp_model_out = "model.json";
  int tp_m = 0, tp_n = 0;
  adl::SimConfig tp_sim;
  adl::TrainConfig tp_train;
  tp->add_option("--tasks", tp_tasks, "task-set JSON (the task pool)")->required();
  tp->add_option("--m", tp_m, "evaluation-set size")->required();
  tp->add_option("--n", tp_n, "number of training tasks")->required();
  tp->add_option("--dataset-out", tp_dataset_out, "dataset CSV path");
  tp->add_option("--model-out", tp_model_out, "model JSON path");
  tp->add_option("--radius", tp_sim.tap_radius_cm, "tap effect radius in cm");
  tp->add_option("--max-taps", tp_sim.max_taps, "tap sample cap per skill");
  tp->add_option("--threshold", tp_sim.coverage_threshold, "coverage success threshold");
  tp->add_option("--hidden", tp_train.hidden, "hidden layer size");
  tp->add_option("--lr", tp_train.learning_rate, "learning rate");
  tp->add_option("--epochs", tp_train.epochs, "training epochs");
  tp->add_option("--batch", tp_train.batch_size, "minibatch size");
  tp->add_option("--weight-decay", tp_train.weight_decay, "L2 weight decay");
  tp->add_option("--split", tp_train.val_split, "validation split fraction");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "build an instance and run a planner");
  InstanceArgs plan_inst_args;
  add_instance_options(plan_cmd, plan_inst_args);
  std::string plan_method;
  double plan_gap = 0.0, plan_theta = 0.5;
  plan_cmd->add_option("--method", plan_method, "adl-bnb | adl-exhaustive | adl-dp | greedy | ad | cba | alm")
      ->required()
      ->check(CLI::IsMember({"adl-bnb", "adl-exhaustive", "adl-dp", "greedy", "ad", "cba", "alm"}));
  plan_cmd->add_option("--gap", plan_gap, "branch-and-bound relative gap tolerance");
  plan_cmd->add_option("--theta", plan_theta, "CBA confidence threshold");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the experiment harness from a config file");
  std::string bench_config;
  bench_cmd->add_option("--config", bench_config, "experiment config JSON")->required();

  // export-mip
  auto* mip = app.add_subcommand("export-mip", "write the planning MIP in LP format");
  InstanceArgs mip_inst_args;
  add_instance_options(mip, mip_inst_args);

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo execution of a plan");
  std::string sim_instance, sim_plan, sim_traces_out, sim_label = "plan";
  int sim_trials = 1000;
  sim_cmd->add_option("--instance", sim_instance, "planner instance JSON")->required();
  sim_cmd->add_option("--plan", sim_plan, "plan JSON")->required();
  sim_cmd->add_option("--trials", sim_trials, "number of rollouts");
  sim_cmd->add_option("--label", sim_label, "method label for the summary row");
  sim_cmd->add_option("--traces-out", sim_traces_out, "optional per-trial CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const adl::Mode mode = adl::mode_from_string(global.mode);

    if (gen->parsed()) {
      std::vector<adl::Task> tasks =
          gen_domain == "grid_part"
              ? adl::generate_grid_part_tasks(gen_count, global.seed, gen_families, gen_costs)
              : adl::generate_block_tasks(gen_count, global.seed, gen_envs, gen_costs);
      if (gen_domain == "block") {
        // the occupancy rendering is internal; block tasks serialize parametrically
        for (adl::Task& t : tasks) {
          t.grid.clear();
          t.grasp_cell.reset();
        }
      }
      const std::string out = global.out.empty() ? "tasks.json" : global.out;
      adl::save_tasks(tasks, out);
      std::printf("wrote %zu tasks to %s\n", tasks.size(), out.c_str());
    }

    if (tp->parsed()) {
      const auto tasks = adl::load_tasks(tp_tasks);
      tp_sim.seed = adl::substream(global.seed, 2);
      const adl::Dataset dataset = adl::get_training_data(tp_m, tp_n, tasks, tp_sim);
      adl::save_dataset_csv(dataset, tp_dataset_out);
      tp_train.seed = adl::substream(global.seed, 3);
      adl::TrainReport report;
      const adl::PreconditionModel model = adl::train(dataset, tp_train, &report);
      adl::save_model(model, tp_model_out);

      adl::Dataset sample;
      sample.feature_dim = dataset.feature_dim;
      for (size_t i = 0; i < dataset.rows.size() && i < 5; ++i) sample.rows.push_back(dataset.rows[i]);
      const double gc = adl::grad_check(model, sample, 1e-5);

      int positives = 0;
      for (const auto& row : dataset.rows) positives += row.label;
      std::printf("rows=%zu skipped_train_tasks=%zu positive_rate=%.4f\n", dataset.rows.size(),
                  dataset.skipped_train_ids.size(),
                  dataset.rows.empty() ? 0.0 : static_cast<double>(positives) / dataset.rows.size());
      std::printf("train_loss=%.6f val_loss=%.6f val_auc=%.4f val_accuracy=%.4f\n",
                  report.final_train_loss, report.final_val_loss, report.val_auc, report.val_accuracy);
      std::printf("grad_check_max_rel_error=%.3g\n", gc);
      if (report.single_class) std::fprintf(stderr, "warning: dataset labels are single-class\n");
      std::printf("dataset=%s model=%s\n", tp_dataset_out.c_str(), tp_model_out.c_str());
    }

    if (plan_cmd->parsed()) {
      const adl::PlanInstance inst = make_instance(plan_inst_args, mode);
      adl::Plan plan;
      if (plan_method == "adl-bnb")
        plan = adl::plan_bnb(inst, plan_gap);
      else if (plan_method == "adl-exhaustive")
        plan = adl::plan_exhaustive(inst);
      else if (plan_method == "adl-dp")
        plan = adl::plan_ssp_dp(inst);
      else if (plan_method == "greedy")
        plan = adl::plan_greedy_facility(inst);
      else if (plan_method == "ad")
        plan = adl::plan_ad(inst);
      else if (plan_method == "cba")
        plan = adl::plan_cba(inst, {plan_theta});
      else
        plan = adl::plan_alm(inst);
      print_plan_table(inst, plan);
      if (!global.out.empty()) {
        adl::save_plan(plan, global.out);
        std::printf("wrote plan to %s\n", global.out.c_str());
      }
    }

    if (bench_cmd->parsed()) {
      adl::ExperimentConfig cfg = adl::load_experiment_config(bench_config);
      if (!global.out.empty()) cfg.out_dir = global.out;
      const adl::BenchResult result = adl::run_bench(cfg, &std::cerr);
      std::printf("%s", adl::bench_summary_csv(result).c_str());
      std::printf("results written to %s\n", cfg.out_dir.c_str());
    }

    if (mip->parsed()) {
      const adl::PlanInstance inst = make_instance(mip_inst_args, mode);
      const std::string out = global.out.empty() ? "instance.lp" : global.out;
      adl::export_mip(inst, out);
      std::printf("wrote LP to %s\n", out.c_str());
    }

    if (sim_cmd->parsed()) {
      const adl::PlanInstance inst = adl::load_instance(sim_instance);
      const adl::Plan plan = adl::load_plan(sim_plan);
      adl::ExecSummary summary;
      const auto traces = adl::simulate_execution(inst, plan, sim_trials, global.seed, &summary);
      std::string csv = "method,seed,objective,realized_mean,demos,delegations,interventions,failures\n";
      csv += sim_label + "," + std::to_string(global.seed) + "," + fmt_num(plan.objective) + "," +
             fmt_num(summary.mean_cost) + "," + std::to_string(summary.demos) + "," +
             std::to_string(summary.delegations) + "," + fmt_num(summary.mean_interventions) + "," +
             fmt_num(summary.mean_failures) + "\n";
      if (!global.out.empty()) {
        adl::write_file(global.out, csv);
        std::printf("wrote summary to %s\n", global.out.c_str());
      }
      std::printf("%s", csv.c_str());
      if (!sim_traces_out.empty()) {
        std::string tcsv = "trial,total_cost,failures\n";
        for (size_t t = 0; t < traces.size(); ++t) {
          int fails = 0;
          for (uint8_t s : traces[t].success) fails += s ? 0 : 1;
          tcsv += std::to_string(t) + "," + fmt_num(traces[t].total) + "," + std::to_string(fails) + "\n";
        }
        adl::write_file(sim_traces_out, tcsv);
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
