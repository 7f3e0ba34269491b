#include "ctqc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ctqc/rng.hpp"

namespace ctqc {

FeatureVector featurize(const Image& slice) {
  const Image small = bilinear_resize(slice, kFeatureSide, kFeatureSide);
  FeatureVector fv(small.pixels.begin(), small.pixels.end());
  fv.push_back(1.0);
  return fv;
}

void TrainConfig::validate() const {
  if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
  if (epochs < 0) throw ConfigError("epochs must be nonnegative");
}

LinearModel train(const std::vector<TrainExample>& data, const ClassStats& stats,
                  const LossFn& loss, const TrainConfig& cfg) {
  cfg.validate();
  if (data.empty())
    throw ArgumentError(ArgumentError::Code::EmptyDataset, "training data is empty");
  stats.validate();
  const int k = stats.num_classes();
  const int dim = static_cast<int>(data.front().features.size());

  std::vector<long> observed(static_cast<std::size_t>(k), 0);
  for (const auto& ex : data) {
    if (static_cast<int>(ex.features.size()) != dim)
      throw ArgumentError(ArgumentError::Code::DimensionMismatch, "inconsistent feature dimensions");
    if (ex.label < 0 || ex.label >= k)
      throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "label out of range");
    ++observed[static_cast<std::size_t>(ex.label)];
  }
  if (observed != stats.counts)
    throw ConfigError("class stats do not match the training data tallies");

  LinearModel model(k, dim);
  std::vector<double> velocity(model.weights.size(), 0.0);
  std::vector<double> grad(model.weights.size(), 0.0);
  std::vector<double> logits(static_cast<std::size_t>(k), 0.0);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);

      for (std::size_t i = start; i < end; ++i) {
        const TrainExample& ex = data[order[i]];
        for (int c = 0; c < k; ++c) {
          double z = 0.0;
          const double* w = model.weights.data() + static_cast<std::size_t>(c) * dim;
          for (int d = 0; d < dim; ++d) z += w[d] * ex.features[static_cast<std::size_t>(d)];
          logits[static_cast<std::size_t>(c)] = z;
        }
        const LossEvaluation eval = loss(logits, ex.label);
        for (int c = 0; c < k; ++c) {
          const double g = eval.grad[static_cast<std::size_t>(c)] * inv_batch;
          if (g == 0.0) continue;
          double* dst = grad.data() + static_cast<std::size_t>(c) * dim;
          for (int d = 0; d < dim; ++d) dst[d] += g * ex.features[static_cast<std::size_t>(d)];
        }
      }

      for (std::size_t i = 0; i < model.weights.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] -
                      cfg.learning_rate * (grad[i] + cfg.weight_decay * model.weights[i]);
        model.weights[i] += velocity[i];
      }
    }
  }
  return model;
}

Prediction predict(const LinearModel& model, const FeatureVector& features) {
  if (static_cast<int>(features.size()) != model.dim)
    throw ArgumentError(ArgumentError::Code::DimensionMismatch,
                        "feature dimension does not match the model");
  Prediction pred;
  pred.logits.resize(static_cast<std::size_t>(model.k));
  for (int c = 0; c < model.k; ++c) {
    double z = 0.0;
    for (int d = 0; d < model.dim; ++d) z += model.at(c, d) * features[static_cast<std::size_t>(d)];
    pred.logits[static_cast<std::size_t>(c)] = z;
  }
  pred.cls = 0;
  for (int c = 1; c < model.k; ++c)
    if (pred.logits[static_cast<std::size_t>(c)] > pred.logits[static_cast<std::size_t>(pred.cls)])
      pred.cls = c;
  return pred;
}

PatientDiagnosis diagnose(const std::vector<int>& per_slice, int num_classes) {
  if (per_slice.empty())
    throw ArgumentError(ArgumentError::Code::EmptyInput, "no per-slice predictions to vote over");
  PatientDiagnosis diag;
  diag.per_slice_predictions = per_slice;
  diag.vote_counts.assign(static_cast<std::size_t>(num_classes), 0);
  for (int cls : per_slice) {
    if (cls < 0 || cls >= num_classes)
      throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "prediction out of range");
    ++diag.vote_counts[static_cast<std::size_t>(cls)];
  }
  // Highest-index winner among tied maxima: scan from the severe end.
  diag.final_class = num_classes - 1;
  for (int c = num_classes - 1; c >= 0; --c)
    if (diag.vote_counts[static_cast<std::size_t>(c)] > diag.vote_counts[static_cast<std::size_t>(diag.final_class)])
      diag.final_class = c;
  return diag;
}

MetricReport evaluate_fold(const LinearModel& model, const std::vector<TrainExample>& fold) {
  if (fold.empty())
    throw ArgumentError(ArgumentError::Code::EmptyInput, "empty evaluation fold");
  std::vector<int> preds, labels;
  preds.reserve(fold.size());
  labels.reserve(fold.size());
  for (const auto& ex : fold) {
    preds.push_back(predict(model, ex.features).cls);
    labels.push_back(ex.label);
  }
  return compute_report(confusion(preds, labels, model.k));
}

namespace {

double crossval_macro_mcc(const std::vector<TrainExample>& data, const FoldAssignment& folds,
                          double m, double s, const GridSearchConfig& cfg) {
  double sum = 0.0;
  for (const auto& val_fold : folds.folds) {
    std::vector<char> in_val(data.size(), 0);
    for (int idx : val_fold) in_val[static_cast<std::size_t>(idx)] = 1;

    std::vector<TrainExample> train_set, val_set;
    for (std::size_t i = 0; i < data.size(); ++i)
      (in_val[i] ? val_set : train_set).push_back(data[i]);

    std::vector<int> train_labels;
    train_labels.reserve(train_set.size());
    for (const auto& ex : train_set) train_labels.push_back(ex.label);
    const ClassStats stats = ClassStats::from_labels(train_labels, kNumClasses);

    LossParams params;
    params.ldam.m = m;
    params.ldam.s = s;
    params.ldam.scaling_mode = cfg.scaling_mode;
    params.cb.beta = cfg.beta;
    const LossFn loss = make_loss(LossKind::CbLdam, stats, params);

    const LinearModel model = train(train_set, stats, loss, cfg.train);
    sum += evaluate_fold(model, val_set).macro.mcc;
  }
  return sum / static_cast<double>(folds.folds.size());
}

} // namespace

GridResult grid_search(const std::vector<TrainExample>& data, const FoldAssignment& folds,
                       const std::vector<double>& m_values, const std::vector<double>& s_values,
                       const GridSearchConfig& cfg) {
  if (m_values.empty() || s_values.empty())
    throw ConfigError("grid must have at least one m and one s value");
  GridResult result;
  result.m_values = m_values;
  result.s_values = s_values;
  result.macro_mcc.resize(m_values.size() * s_values.size());
  for (std::size_t mi = 0; mi < m_values.size(); ++mi)
    for (std::size_t si = 0; si < s_values.size(); ++si)
      result.macro_mcc[mi * s_values.size() + si] =
          crossval_macro_mcc(data, folds, m_values[mi], s_values[si], cfg);
  return result;
}

GridResult grid_search(const std::vector<TrainExample>& data, const std::vector<double>& m_values,
                       const std::vector<double>& s_values, const GridSearchConfig& cfg) {
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& ex : data) labels.push_back(ex.label);
  const FoldAssignment folds = crossval_split(labels, kNumClasses, cfg.k, cfg.seed);
  return grid_search(data, folds, m_values, s_values, cfg);
}

std::string grid_csv(const GridResult& grid) {
  char buf[64];
  std::ostringstream out;
  out << "m\\s";
  for (double s : grid.s_values) {
    std::snprintf(buf, sizeof(buf), "%.6g", s);
    out << "," << buf;
  }
  out << "\n";
  for (std::size_t mi = 0; mi < grid.m_values.size(); ++mi) {
    std::snprintf(buf, sizeof(buf), "%.6g", grid.m_values[mi]);
    out << buf;
    for (std::size_t si = 0; si < grid.s_values.size(); ++si) {
      std::snprintf(buf, sizeof(buf), "%.6g", grid.macro_mcc[mi * grid.s_values.size() + si]);
      out << "," << buf;
    }
    out << "\n";
  }
  return out.str();
}

} // namespace ctqc
