#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adl/coverage_sim.hpp"
#include "adl/task.hpp"

namespace adl {

// Two-layer feed-forward classifier over a (training-task, test-task)
// feature pair: standardize -> linear -> ReLU -> linear -> logistic.
// Predicts the probability that a skill learned on the first task
// completes the second.
struct PreconditionModel {
  int input_dim = 0;   // 2 * task feature dimension
  int hidden_dim = 0;
  std::vector<double> w1;  // hidden_dim x input_dim, row-major
  std::vector<double> b1;  // hidden_dim
  std::vector<double> w2;  // hidden_dim
  double b2 = 0.0;
  std::vector<double> norm_mean;   // input_dim
  std::vector<double> norm_scale;  // input_dim

  // Probability for a concatenated, unnormalized input; strictly in (0,1).
  double predict_input(std::span<const double> input) const;
  double predict_pair(std::span<const double> train_features, std::span<const double> test_features) const;
};

double predict(const PreconditionModel& model, const Task& train_task, const Task& test_task);

struct TrainConfig {
  int hidden = 32;
  double learning_rate = 1e-3;
  int epochs = 200;
  int batch_size = 32;
  double weight_decay = 1e-4;
  uint64_t seed = 0;
  double val_split = 0.2;
};

struct TrainReport {
  int train_rows = 0;
  int val_rows = 0;
  double positive_rate = 0.0;
  bool single_class = false;
  bool class_weights_used = false;
  std::vector<double> loss_history;  // mean minibatch loss per epoch
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
  double val_auc = 0.0;       // NaN when undefined (single-class validation)
  double val_accuracy = 0.0;  // at the 0.5 threshold
};

// Minimizes (optionally class-weighted) binary cross-entropy plus an L2
// weight penalty with minibatch gradient descent. Deterministic under
// cfg.seed. Throws on an empty dataset; warns via report on single-class data.
PreconditionModel train(const Dataset& dataset, const TrainConfig& cfg, TrainReport* report = nullptr);

// Compares analytic parameter gradients of the loss on `sample` against
// central finite differences; returns the max relative error over all
// parameters (absolute floor 1e-8 for near-zero gradient pairs).
double grad_check(const PreconditionModel& model, const Dataset& sample, double epsilon);

// Area under the ROC curve with tie-aware ranking; NaN for single-class labels.
double auc_score(const std::vector<double>& scores, const std::vector<int>& labels);

// Model file: {version, dims, normalization:{mean,scale}, layer1:{W,b}, layer2:{W,b}}
std::string model_to_json(const PreconditionModel& model);
PreconditionModel model_from_json(const std::string& text);
void save_model(const PreconditionModel& model, const std::string& path);
PreconditionModel load_model(const std::string& path);

}  // namespace adl
