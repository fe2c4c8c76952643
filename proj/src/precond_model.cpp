#include "adl/precond_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "adl/rng.hpp"
#include "json.hpp"

namespace adl {

namespace {

using nlohmann::json;

constexpr double kProbClamp = 1e-15;

double stable_bce(double logit, double y) {
  // -y*log(p) - (1-y)*log(1-p), computed from the logit
  return std::max(logit, 0.0) - logit * y + std::log1p(std::exp(-std::abs(logit)));
}

struct Gradients {
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  explicit Gradients(const PreconditionModel& m)
      : w1(m.w1.size(), 0.0), b1(m.b1.size(), 0.0), w2(m.w2.size(), 0.0) {}
};

double forward_logit(const PreconditionModel& m, const double* xs, std::vector<double>& hidden) {
  hidden.resize(m.hidden_dim);
  double z2 = m.b2;
  for (int j = 0; j < m.hidden_dim; ++j) {
    const double* row = m.w1.data() + static_cast<size_t>(j) * m.input_dim;
    double pre = m.b1[j];
    for (int i = 0; i < m.input_dim; ++i) pre += row[i] * xs[i];
    hidden[j] = pre > 0.0 ? pre : 0.0;
    z2 += m.w2[j] * hidden[j];
  }
  return z2;
}

// Weighted-mean BCE over the given standardized rows plus the L2 weight
// penalty. Accumulates parameter gradients into *grads when non-null.
double loss_and_grad(const PreconditionModel& m, const std::vector<double>& xs_matrix,
                     const std::vector<int>& labels, const std::vector<double>& sample_weights,
                     const std::vector<int>& rows, double weight_decay, Gradients* grads) {
  double loss = 0.0;
  double weight_total = 0.0;
  for (int r : rows) weight_total += sample_weights[r];
  std::vector<double> hidden;
  for (int r : rows) {
    const double* xs = xs_matrix.data() + static_cast<size_t>(r) * m.input_dim;
    const double z2 = forward_logit(m, xs, hidden);
    const double y = static_cast<double>(labels[r]);
    const double w = sample_weights[r] / weight_total;
    loss += w * stable_bce(z2, y);
    if (!grads) continue;
    const double dz2 = w * (1.0 / (1.0 + std::exp(-z2)) - y);
    grads->b2 += dz2;
    for (int j = 0; j < m.hidden_dim; ++j) {
      grads->w2[j] += dz2 * hidden[j];
      if (hidden[j] <= 0.0) continue;
      const double dpre = dz2 * m.w2[j];
      grads->b1[j] += dpre;
      double* grow = grads->w1.data() + static_cast<size_t>(j) * m.input_dim;
      for (int i = 0; i < m.input_dim; ++i) grow[i] += dpre * xs[i];
    }
  }
  double sq = 0.0;
  for (double w : m.w1) sq += w * w;
  for (double w : m.w2) sq += w * w;
  loss += 0.5 * weight_decay * sq;
  if (grads) {
    for (size_t i = 0; i < m.w1.size(); ++i) grads->w1[i] += weight_decay * m.w1[i];
    for (size_t i = 0; i < m.w2.size(); ++i) grads->w2[i] += weight_decay * m.w2[i];
  }
  return loss;
}

std::vector<double> standardized_matrix(const PreconditionModel& m, const Dataset& ds) {
  std::vector<double> xs(ds.rows.size() * static_cast<size_t>(m.input_dim));
  for (size_t r = 0; r < ds.rows.size(); ++r) {
    double* out = xs.data() + r * m.input_dim;
    const auto& row = ds.rows[r];
    const size_t d = row.train_features.size();
    for (size_t i = 0; i < d; ++i) out[i] = (row.train_features[i] - m.norm_mean[i]) / m.norm_scale[i];
    for (size_t i = 0; i < d; ++i)
      out[d + i] = (row.test_features[i] - m.norm_mean[d + i]) / m.norm_scale[d + i];
  }
  return xs;
}

void check_dataset(const Dataset& ds) {
  if (ds.rows.empty()) throw std::invalid_argument("train: empty dataset");
  for (const auto& row : ds.rows) {
    if (static_cast<int>(row.train_features.size()) != ds.feature_dim ||
        static_cast<int>(row.test_features.size()) != ds.feature_dim)
      throw std::invalid_argument("train: row feature dimension does not match dataset feature_dim");
    if (row.label != 0 && row.label != 1) throw std::invalid_argument("train: labels must be binary");
  }
}

}  // namespace

double PreconditionModel::predict_input(std::span<const double> input) const {
  if (static_cast<int>(input.size()) != input_dim)
    throw std::invalid_argument("predict: input dimension " + std::to_string(input.size()) +
                                " does not match model input_dim " + std::to_string(input_dim));
  std::vector<double> xs(input_dim);
  for (int i = 0; i < input_dim; ++i) xs[i] = (input[i] - norm_mean[i]) / norm_scale[i];
  std::vector<double> hidden;
  const double z2 = forward_logit(*this, xs.data(), hidden);
  const double p = 1.0 / (1.0 + std::exp(-z2));
  return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

double PreconditionModel::predict_pair(std::span<const double> train_features,
                                       std::span<const double> test_features) const {
  if (static_cast<int>(train_features.size() + test_features.size()) != input_dim)
    throw std::invalid_argument("predict_pair: feature dimensions do not match model input");
  std::vector<double> input;
  input.reserve(input_dim);
  input.insert(input.end(), train_features.begin(), train_features.end());
  input.insert(input.end(), test_features.begin(), test_features.end());
  return predict_input(input);
}

double predict(const PreconditionModel& model, const Task& train_task, const Task& test_task) {
  return model.predict_pair(train_task.features, test_task.features);
}

PreconditionModel train(const Dataset& dataset, const TrainConfig& cfg, TrainReport* report) {
  check_dataset(dataset);
  if (cfg.hidden < 1 || cfg.learning_rate <= 0.0 || cfg.epochs < 1 || cfg.batch_size < 1 ||
      cfg.weight_decay < 0.0 || cfg.val_split <= 0.0 || cfg.val_split >= 1.0)
    throw std::invalid_argument("train: invalid TrainConfig");

  const int n_rows = static_cast<int>(dataset.rows.size());
  std::vector<int> order(n_rows);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(substream(cfg.seed, 1));
  split_rng.shuffle(order);
  const int n_val = static_cast<int>(std::floor(n_rows * cfg.val_split));
  std::vector<int> train_rows(order.begin(), order.end() - n_val);
  std::vector<int> val_rows(order.end() - n_val, order.end());

  PreconditionModel m;
  m.input_dim = 2 * dataset.feature_dim;
  m.hidden_dim = cfg.hidden;
  m.norm_mean.assign(m.input_dim, 0.0);
  m.norm_scale.assign(m.input_dim, 1.0);

  // normalization statistics from the training split only
  auto input_at = [&](int r, int i) {
    const auto& row = dataset.rows[r];
    return i < dataset.feature_dim ? row.train_features[i] : row.test_features[i - dataset.feature_dim];
  };
  for (int i = 0; i < m.input_dim; ++i) {
    double mean = 0.0;
    for (int r : train_rows) mean += input_at(r, i);
    mean /= train_rows.size();
    double var = 0.0;
    for (int r : train_rows) {
      const double d = input_at(r, i) - mean;
      var += d * d;
    }
    const double stddev = std::sqrt(var / train_rows.size());
    m.norm_mean[i] = mean;
    m.norm_scale[i] = stddev > 1e-12 ? stddev : 1.0;
  }

  Rng init_rng(substream(cfg.seed, 2));
  m.w1.resize(static_cast<size_t>(m.hidden_dim) * m.input_dim);
  m.b1.assign(m.hidden_dim, 0.0);
  m.w2.resize(m.hidden_dim);
  const double limit1 = std::sqrt(6.0 / (m.input_dim + m.hidden_dim));
  for (double& w : m.w1) w = init_rng.uniform(-limit1, limit1);
  const double limit2 = std::sqrt(6.0 / (m.hidden_dim + 1));
  for (double& w : m.w2) w = init_rng.uniform(-limit2, limit2);

  // inverse-frequency sample weights when labels are heavily skewed
  int n_pos = 0;
  for (int r : train_rows) n_pos += dataset.rows[r].label;
  const double pos_rate = static_cast<double>(n_pos) / train_rows.size();
  const bool single_class = n_pos == 0 || n_pos == static_cast<int>(train_rows.size());
  const bool weight_classes = !single_class && (pos_rate < 0.2 || pos_rate > 0.8);
  std::vector<double> sample_weights(n_rows, 1.0);
  if (weight_classes) {
    const double w_pos = train_rows.size() / (2.0 * n_pos);
    const double w_neg = train_rows.size() / (2.0 * (train_rows.size() - n_pos));
    for (int r = 0; r < n_rows; ++r)
      sample_weights[r] = dataset.rows[r].label ? w_pos : w_neg;
  }

  std::vector<int> labels(n_rows);
  for (int r = 0; r < n_rows; ++r) labels[r] = dataset.rows[r].label;
  const std::vector<double> xs = standardized_matrix(m, dataset);

  std::vector<double> loss_history;
  loss_history.reserve(cfg.epochs);
  Rng epoch_rng(substream(cfg.seed, 3));
  std::vector<int> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    epoch_rng.shuffle(train_rows);
    double epoch_loss = 0.0;
    int batches = 0;
    for (size_t start = 0; start < train_rows.size(); start += cfg.batch_size) {
      const size_t end = std::min(train_rows.size(), start + cfg.batch_size);
      batch.assign(train_rows.begin() + start, train_rows.begin() + end);
      Gradients grads(m);
      epoch_loss += loss_and_grad(m, xs, labels, sample_weights, batch, cfg.weight_decay, &grads);
      ++batches;
      for (size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= cfg.learning_rate * grads.w1[i];
      for (int j = 0; j < m.hidden_dim; ++j) {
        m.b1[j] -= cfg.learning_rate * grads.b1[j];
        m.w2[j] -= cfg.learning_rate * grads.w2[j];
      }
      m.b2 -= cfg.learning_rate * grads.b2;
    }
    loss_history.push_back(epoch_loss / batches);
  }

  if (report) {
    report->train_rows = static_cast<int>(train_rows.size());
    report->val_rows = n_val;
    report->positive_rate = pos_rate;
    report->single_class = single_class;
    report->class_weights_used = weight_classes;
    report->loss_history = std::move(loss_history);
    report->final_train_loss = loss_and_grad(m, xs, labels, sample_weights, train_rows, cfg.weight_decay, nullptr);
    if (n_val > 0) {
      report->final_val_loss = loss_and_grad(m, xs, labels, sample_weights, val_rows, cfg.weight_decay, nullptr);
      std::vector<double> scores;
      std::vector<int> val_labels;
      std::vector<double> hidden;
      int correct = 0;
      for (int r : val_rows) {
        const double z = forward_logit(m, xs.data() + static_cast<size_t>(r) * m.input_dim, hidden);
        const double p = 1.0 / (1.0 + std::exp(-z));
        scores.push_back(p);
        val_labels.push_back(labels[r]);
        correct += (p > 0.5 ? 1 : 0) == labels[r] ? 1 : 0;
      }
      report->val_auc = auc_score(scores, val_labels);
      report->val_accuracy = static_cast<double>(correct) / n_val;
    } else {
      report->final_val_loss = std::numeric_limits<double>::quiet_NaN();
      report->val_auc = std::numeric_limits<double>::quiet_NaN();
      report->val_accuracy = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return m;
}

double grad_check(const PreconditionModel& model, const Dataset& sample, double epsilon) {
  if (epsilon < 1e-7 || epsilon > 1e-3)
    throw std::invalid_argument("grad_check: epsilon must be in [1e-7, 1e-3]");
  check_dataset(sample);

  PreconditionModel m = model;
  const std::vector<double> xs = standardized_matrix(m, sample);
  std::vector<int> labels;
  for (const auto& row : sample.rows) labels.push_back(row.label);
  std::vector<int> all_rows(sample.rows.size());
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const std::vector<double> weights(sample.rows.size(), 1.0);
  constexpr double kWeightDecay = 1e-4;

  Gradients analytic(m);
  loss_and_grad(m, xs, labels, weights, all_rows, kWeightDecay, &analytic);

  std::vector<double*> params;
  std::vector<double> analytic_flat;
  for (size_t i = 0; i < m.w1.size(); ++i) {
    params.push_back(&m.w1[i]);
    analytic_flat.push_back(analytic.w1[i]);
  }
  for (size_t i = 0; i < m.b1.size(); ++i) {
    params.push_back(&m.b1[i]);
    analytic_flat.push_back(analytic.b1[i]);
  }
  for (size_t i = 0; i < m.w2.size(); ++i) {
    params.push_back(&m.w2[i]);
    analytic_flat.push_back(analytic.w2[i]);
  }
  params.push_back(&m.b2);
  analytic_flat.push_back(analytic.b2);

  double max_rel = 0.0;
  for (size_t k = 0; k < params.size(); ++k) {
    const double saved = *params[k];
    *params[k] = saved + epsilon;
    const double lp = loss_and_grad(m, xs, labels, weights, all_rows, kWeightDecay, nullptr);
    *params[k] = saved - epsilon;
    const double lm = loss_and_grad(m, xs, labels, weights, all_rows, kWeightDecay, nullptr);
    *params[k] = saved;
    const double numeric = (lp - lm) / (2.0 * epsilon);
    const double rel =
        std::abs(analytic_flat[k] - numeric) / std::max(1e-8, std::abs(analytic_flat[k]) + std::abs(numeric));
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

double auc_score(const std::vector<double>& scores, const std::vector<int>& labels) {
  const size_t n = scores.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  size_t n_pos = 0;
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * (i + j + 1);  // 1-based average rank of the tie group
    for (size_t k = i; k < j; ++k) {
      if (labels[idx[k]]) {
        rank_sum_pos += avg_rank;
        ++n_pos;
      }
    }
    i = j;
  }
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
  return (rank_sum_pos - 0.5 * n_pos * (n_pos + 1)) / (static_cast<double>(n_pos) * n_neg);
}

std::string model_to_json(const PreconditionModel& m) {
  json o;
  o["version"] = 1;
  o["dims"] = {{"input", m.input_dim}, {"hidden", m.hidden_dim}};
  o["normalization"] = {{"mean", m.norm_mean}, {"scale", m.norm_scale}};
  json w1 = json::array();
  for (int j = 0; j < m.hidden_dim; ++j) {
    w1.push_back(std::vector<double>(m.w1.begin() + static_cast<size_t>(j) * m.input_dim,
                                     m.w1.begin() + static_cast<size_t>(j + 1) * m.input_dim));
  }
  o["layer1"] = {{"W", w1}, {"b", m.b1}};
  o["layer2"] = {{"W", m.w2}, {"b", m.b2}};
  return o.dump(2) + "\n";
}

PreconditionModel model_from_json(const std::string& text) {
  json o;
  try {
    o = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model: malformed JSON: ") + e.what());
  }
  try {
    const int version = o.at("version").get<int>();
    if (version != 1)
      throw std::runtime_error("model: incompatible file version " + std::to_string(version) +
                               " (expected 1)");
    PreconditionModel m;
    m.input_dim = o.at("dims").at("input").get<int>();
    m.hidden_dim = o.at("dims").at("hidden").get<int>();
    m.norm_mean = o.at("normalization").at("mean").get<std::vector<double>>();
    m.norm_scale = o.at("normalization").at("scale").get<std::vector<double>>();
    for (const auto& row : o.at("layer1").at("W")) {
      const auto vals = row.get<std::vector<double>>();
      if (static_cast<int>(vals.size()) != m.input_dim)
        throw std::runtime_error("model: layer1 row width does not match input dim");
      m.w1.insert(m.w1.end(), vals.begin(), vals.end());
    }
    m.b1 = o.at("layer1").at("b").get<std::vector<double>>();
    m.w2 = o.at("layer2").at("W").get<std::vector<double>>();
    m.b2 = o.at("layer2").at("b").get<double>();
    if (static_cast<int>(m.w1.size()) != m.hidden_dim * m.input_dim ||
        static_cast<int>(m.b1.size()) != m.hidden_dim || static_cast<int>(m.w2.size()) != m.hidden_dim ||
        static_cast<int>(m.norm_mean.size()) != m.input_dim ||
        static_cast<int>(m.norm_scale.size()) != m.input_dim)
      throw std::runtime_error("model: parameter shapes do not match dims");
    return m;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("model: missing or mistyped field: ") + e.what());
  }
}

void save_model(const PreconditionModel& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

PreconditionModel load_model(const std::string& path) {
  return model_from_json(read_file(path));
}

}  // namespace adl
