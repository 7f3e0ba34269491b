#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctqc/image.hpp"
#include "ctqc/losses.hpp"
#include "ctqc/metrics.hpp"

namespace ctqc {

/// Downsampled, flattened slice plus a trailing bias feature fixed at 1.
using FeatureVector = std::vector<double>;

inline constexpr int kFeatureSide = 16;
inline constexpr int kFeatureDim = kFeatureSide * kFeatureSide + 1;

/// Bilinear 16x16 downsample, row-major flatten, append bias 1.
FeatureVector featurize(const Image& slice);

struct TrainExample {
  FeatureVector features;
  int label = 0;
};

/// Linear softmax classifier: logits = W * features, W is K x (D+1) row-major.
struct LinearModel {
  int k = 0;
  int dim = 0;
  std::vector<double> weights;

  LinearModel() = default;
  LinearModel(int k_, int dim_) : k(k_), dim(dim_), weights(static_cast<std::size_t>(k_) * dim_, 0.0) {}

  double& at(int cls, int d) { return weights[static_cast<std::size_t>(cls) * dim + d]; }
  double at(int cls, int d) const { return weights[static_cast<std::size_t>(cls) * dim + d]; }
};

struct TrainConfig {
  double learning_rate = 0.0004;
  int batch_size = 32;
  double momentum = 0.9;
  double weight_decay = 0.001;
  int epochs = 120;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mini-batch gradient descent with momentum and L2 weight decay from a zero
/// initialization; shuffling is seeded per run, so equal inputs give
/// bit-identical models. stats must tally the training labels exactly.
LinearModel train(const std::vector<TrainExample>& data, const ClassStats& stats,
                  const LossFn& loss, const TrainConfig& cfg);

struct Prediction {
  std::vector<double> logits;
  int cls = 0; // argmax, lowest index on ties
};

Prediction predict(const LinearModel& model, const FeatureVector& features);

struct PatientDiagnosis {
  std::vector<int> per_slice_predictions;
  std::vector<int> vote_counts;
  int final_class = 0;
};

/// Majority vote over per-slice predictions; ties resolve to the most severe
/// (highest-index) tied class.
PatientDiagnosis diagnose(const std::vector<int>& per_slice, int num_classes = kNumClasses);

/// Predicts every example and scores the fold.
MetricReport evaluate_fold(const LinearModel& model, const std::vector<TrainExample>& fold);

struct GridSearchConfig {
  int k = 4;
  std::uint64_t seed = 0;
  TrainConfig train;
  double beta = 0.999; // class-balanced reweighting, fixed while sweeping (m, s)
  ScalingMode scaling_mode = ScalingMode::Divide;
};

struct GridResult {
  std::vector<double> m_values;
  std::vector<double> s_values;
  std::vector<double> macro_mcc; // row-major, rows = m, cols = s
};

/// k-fold cross-validated macro MCC of the cb_ldam loss over an (m, s) grid,
/// using precomputed example-level folds.
GridResult grid_search(const std::vector<TrainExample>& data, const FoldAssignment& folds,
                       const std::vector<double>& m_values, const std::vector<double>& s_values,
                       const GridSearchConfig& cfg);

/// Convenience overload that stratifies the folds from the example labels.
GridResult grid_search(const std::vector<TrainExample>& data, const std::vector<double>& m_values,
                       const std::vector<double>& s_values, const GridSearchConfig& cfg);

/// CSV heat map: header row "m\s, s1, s2, ...", one row per m, cells with six
/// significant digits.
std::string grid_csv(const GridResult& grid);

} // namespace ctqc
