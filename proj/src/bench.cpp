#include "adl/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "adl/rng.hpp"
#include "adl/task_gen.hpp"
#include "json.hpp"

namespace adl {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

CostVector costs_from_json(const json& c) {
  return {c.at("c_rob").get<double>(), c.at("c_hum").get<double>(), c.at("c_demo").get<double>(),
          c.at("c_fail").get<double>()};
}

struct Timed {
  Plan plan;
  double ms = 0.0;
};

template <typename F>
Timed timed_plan(F&& solve) {
  const auto start = std::chrono::steady_clock::now();
  Timed out;
  out.plan = solve();
  out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("experiment config: malformed JSON: ") + e.what());
  }
  std::vector<std::string> missing;
  for (const char* field : {"domain", "n_tasks", "pretrain_levels", "seeds", "out_dir"})
    if (!o.contains(field)) missing.emplace_back(field);
  if (!missing.empty()) {
    std::string msg = "experiment config: missing required fields:";
    for (const auto& f : missing) msg += " " + f;
    throw std::runtime_error(msg);
  }

  ExperimentConfig cfg;
  cfg.domain = o.at("domain").get<std::string>();
  if (cfg.domain != "grid_part" && cfg.domain != "block")
    throw std::runtime_error("experiment config: domain must be grid_part or block");
  cfg.n_tasks = o.at("n_tasks").get<int>();
  cfg.pretrain_levels = o.at("pretrain_levels").get<std::vector<int>>();
  cfg.seeds = o.at("seeds").get<std::vector<uint64_t>>();
  cfg.out_dir = o.at("out_dir").get<std::string>();
  if (cfg.seeds.empty()) throw std::runtime_error("experiment config: seeds must be nonempty");
  if (cfg.n_tasks < 1) throw std::runtime_error("experiment config: n_tasks must be >= 1");

  if (o.contains("root_seed")) cfg.root_seed = o.at("root_seed").get<uint64_t>();
  if (o.contains("ground_count")) cfg.ground_count = o.at("ground_count").get<int>();
  if (o.contains("families")) cfg.families = o.at("families").get<int>();
  if (o.contains("envs")) cfg.envs = o.at("envs").get<int>();
  if (o.contains("costs")) cfg.costs = costs_from_json(o.at("costs"));
  if (o.contains("cba_thetas")) cfg.cba_thetas = o.at("cba_thetas").get<std::vector<double>>();
  if (o.contains("mode")) cfg.mode = mode_from_string(o.at("mode").get<std::string>());
  if (o.contains("mc_trials")) cfg.mc_trials = o.at("mc_trials").get<int>();
  if (o.contains("data_m")) cfg.data_m = o.at("data_m").get<int>();
  if (o.contains("data_n")) cfg.data_n = o.at("data_n").get<int>();
  if (o.contains("pretrain_overlap")) {
    const std::string v = o.at("pretrain_overlap").get<std::string>();
    if (v != "allow" && v != "exclude")
      throw std::runtime_error("experiment config: pretrain_overlap must be allow or exclude");
    cfg.pretrain_overlap = v == "allow";
  }
  if (o.contains("sim")) {
    const auto& s = o.at("sim");
    if (s.contains("tap_radius_cm")) cfg.sim.tap_radius_cm = s.at("tap_radius_cm").get<double>();
    if (s.contains("max_taps")) cfg.sim.max_taps = s.at("max_taps").get<int>();
    if (s.contains("coverage_threshold"))
      cfg.sim.coverage_threshold = s.at("coverage_threshold").get<double>();
  }
  if (o.contains("train")) {
    const auto& t = o.at("train");
    if (t.contains("hidden")) cfg.train.hidden = t.at("hidden").get<int>();
    if (t.contains("learning_rate")) cfg.train.learning_rate = t.at("learning_rate").get<double>();
    if (t.contains("epochs")) cfg.train.epochs = t.at("epochs").get<int>();
    if (t.contains("batch_size")) cfg.train.batch_size = t.at("batch_size").get<int>();
    if (t.contains("weight_decay")) cfg.train.weight_decay = t.at("weight_decay").get<double>();
    if (t.contains("val_split")) cfg.train.val_split = t.at("val_split").get<double>();
  }
  if (o.contains("model_path")) cfg.model_path = o.at("model_path").get<std::string>();

  const int reserved = cfg.pretrain_overlap ? 0 : cfg.n_tasks;
  const int max_level = *std::max_element(cfg.pretrain_levels.begin(), cfg.pretrain_levels.end());
  if (max_level > cfg.ground_count - reserved)
    throw std::runtime_error("experiment config: pretrain level " + std::to_string(max_level) +
                             " exceeds available training tasks (" +
                             std::to_string(cfg.ground_count - reserved) + ")");
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return experiment_config_from_json(read_file(path));
}

BenchResult run_bench(const ExperimentConfig& cfg, std::ostream* log) {
  const uint64_t root = cfg.root_seed;
  SimConfig sim = cfg.sim;
  sim.seed = substream(root, 2);

  std::vector<Task> ground = cfg.domain == "grid_part"
                                 ? generate_grid_part_tasks(cfg.ground_count, substream(root, 1),
                                                            cfg.families, cfg.costs)
                                 : generate_block_tasks(cfg.ground_count, substream(root, 1), cfg.envs,
                                                        cfg.costs);

  BenchResult result;
  PreconditionModel model;
  if (!cfg.model_path.empty()) {
    model = load_model(cfg.model_path);
    if (log) *log << "bench: loaded model from " << cfg.model_path << "\n";
  } else {
    const int m = cfg.data_m > 0 ? cfg.data_m : cfg.ground_count;
    const int n = cfg.data_n > 0 ? cfg.data_n : cfg.ground_count;
    if (log) *log << "bench: generating precondition dataset (m=" << m << ", n=" << n << ")\n";
    const Dataset dataset = get_training_data(m, n, ground, sim);
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = substream(root, 3);
    model = train(dataset, train_cfg, &result.train_report);
    result.model_trained = true;
    if (log)
      *log << "bench: model trained (rows=" << dataset.rows.size()
           << ", val_auc=" << result.train_report.val_auc << ")\n";
  }

  std::vector<std::string> baseline_methods{"ad"};
  for (double theta : cfg.cba_thetas) baseline_methods.push_back("cba_" + fmt(theta));
  baseline_methods.emplace_back("alm");

  double ratio_sum = 0.0;
  long ratio_count = 0;
  std::map<std::pair<int, std::string>, std::vector<double>> objectives;  // (level, method)
  std::map<std::pair<int, std::string>, std::vector<double>> realized;

  for (int level : cfg.pretrain_levels) {
    for (uint64_t seed : cfg.seeds) {
      // test sequence: n_tasks sampled uniformly without replacement
      std::vector<int> order(ground.size());
      std::iota(order.begin(), order.end(), 0);
      Rng seq_rng(substream(substream(root, 4), seed));
      seq_rng.shuffle(order);
      std::vector<Task> test_tasks;
      std::unordered_set<int> test_ids;
      for (int k = 0; k < cfg.n_tasks; ++k) {
        test_tasks.push_back(ground[order[k]]);
        test_ids.insert(ground[order[k]].id);
      }

      std::vector<Task> pool;
      for (const Task& t : ground)
        if (cfg.pretrain_overlap || !test_ids.count(t.id)) pool.push_back(t);
      const SkillLibrary library =
          pretrain_library(pool, level, substream(substream(substream(root, 5), seed), level), sim);

      const PlanInstance inst = build_instance(test_tasks, library, model, cfg.mode);

      std::vector<std::pair<std::string, Timed>> solved;
      solved.emplace_back("adl", timed_plan([&] { return plan_bnb(inst, 0.0); }));
      solved.emplace_back("greedy", timed_plan([&] { return plan_greedy_facility(inst); }));
      for (const std::string& method : baseline_methods) {
        if (method == "ad") {
          solved.emplace_back(method, timed_plan([&] { return plan_ad(inst); }));
        } else if (method == "alm") {
          solved.emplace_back(method, timed_plan([&] { return plan_alm(inst); }));
        } else {
          const double theta = std::stod(method.substr(4));
          solved.emplace_back(method, timed_plan([&] { return plan_cba(inst, {theta}); }));
        }
      }

      const double adl_objective = solved.front().second.plan.objective;
      uint64_t mc_tag = mix64(seed) ^ mix64(static_cast<uint64_t>(level) + 0x51ull);
      for (const auto& [method, timed] : solved) {
        if (method != "adl" && method != "greedy" && timed.plan.objective < adl_objective - 1e-9)
          throw std::logic_error("bench: optimal planner objective exceeds baseline " + method +
                                 " (level " + std::to_string(level) + ", seed " + std::to_string(seed) +
                                 ")");
        ExecSummary summary;
        simulate_execution(inst, timed.plan, cfg.mc_trials,
                           substream(substream(root, 6), mc_tag ^ mix64(std::hash<std::string>{}(method))),
                           &summary);
        BenchRow row;
        row.level = level;
        row.seed = seed;
        row.method = method;
        row.objective = timed.plan.objective;
        row.realized_mean = summary.mean_cost;
        row.demos = summary.demos;
        row.delegations = summary.delegations;
        row.failures = summary.mean_failures;
        row.wall_time_ms = timed.ms;
        result.rows.push_back(row);
        objectives[{level, method}].push_back(row.objective);
        realized[{level, method}].push_back(row.realized_mean);
        if (method == "greedy" && adl_objective > 1e-300) {
          ratio_sum += row.objective / adl_objective;
          result.greedy_ratio_max = std::max(result.greedy_ratio_max, row.objective / adl_objective);
          ++ratio_count;
        }
      }
      if (log) *log << "bench: level " << level << " seed " << seed << " adl=" << adl_objective << "\n";
    }
  }
  if (ratio_count > 0) result.greedy_ratio_mean = ratio_sum / ratio_count;

  std::vector<std::string> all_methods{"adl", "greedy"};
  all_methods.insert(all_methods.end(), baseline_methods.begin(), baseline_methods.end());
  for (int level : cfg.pretrain_levels) {
    const auto& adl_objs = objectives[{level, "adl"}];
    const double adl_mean = std::accumulate(adl_objs.begin(), adl_objs.end(), 0.0) / adl_objs.size();
    for (const std::string& method : all_methods) {
      const auto& objs = objectives[{level, method}];
      const auto& real = realized[{level, method}];
      BenchSummaryRow s;
      s.level = level;
      s.method = method;
      s.mean_objective = std::accumulate(objs.begin(), objs.end(), 0.0) / objs.size();
      s.mean_realized = std::accumulate(real.begin(), real.end(), 0.0) / real.size();
      s.adl_delta = s.mean_objective - adl_mean;
      result.summary.push_back(s);
    }
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/results.csv", bench_rows_csv(result.rows));
    write_file(cfg.out_dir + "/summary.csv", bench_summary_csv(result));
    if (result.model_trained) save_model(model, cfg.out_dir + "/model.json");
  }
  return result;
}

std::string bench_rows_csv(const std::vector<BenchRow>& rows) {
  std::string out = "level,seed,method,objective,realized_mean,demos,delegations,failures,wall_time_ms\n";
  for (const BenchRow& r : rows) {
    out += std::to_string(r.level) + "," + std::to_string(r.seed) + "," + r.method + "," +
           fmt(r.objective) + "," + fmt(r.realized_mean) + "," + fmt(r.demos) + "," +
           fmt(r.delegations) + "," + fmt(r.failures) + "," + fmt(r.wall_time_ms) + "\n";
  }
  return out;
}

std::string bench_summary_csv(const BenchResult& result) {
  std::string out = "level,method,mean_objective,mean_realized,adl_delta\n";
  for (const BenchSummaryRow& s : result.summary) {
    out += std::to_string(s.level) + "," + s.method + "," + fmt(s.mean_objective) + "," +
           fmt(s.mean_realized) + "," + fmt(s.adl_delta) + "\n";
  }
  out += "# greedy_ratio_mean=" + fmt(result.greedy_ratio_mean) +
         " greedy_ratio_max=" + fmt(result.greedy_ratio_max) + "\n";
  return out;
}

}  // namespace adl
