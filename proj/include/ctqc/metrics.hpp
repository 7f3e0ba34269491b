#pragma once

#include <cstdint>
#include <vector>

#include "ctqc/errors.hpp"
#include "ctqc/volume.hpp"

namespace ctqc {

/// K x K contingency table; cell (true t, predicted p).
struct ConfusionMatrix {
  int k = 0;
  std::vector<std::int64_t> cells; // row-major, row = true class

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int k_) : k(k_), cells(static_cast<std::size_t>(k_) * k_, 0) {}

  std::int64_t& at(int t, int p) { return cells[static_cast<std::size_t>(t) * k + p]; }
  std::int64_t at(int t, int p) const { return cells[static_cast<std::size_t>(t) * k + p]; }

  std::int64_t total() const;
  std::int64_t row_sum(int t) const;
  std::int64_t col_sum(int p) const;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels, int k);

struct BinaryCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// One-vs-rest reduction of class c.
BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int c);

/// Per-class value plus the unweighted mean over classes.
struct PerClassMetric {
  std::vector<double> per_class;
  double macro = 0.0;
};

/// Matthews correlation coefficient per class (one-vs-rest); any zero factor
/// under the radical yields 0 by convention.
PerClassMetric mcc(const ConfusionMatrix& cm);

struct PrecisionRecallF1 {
  std::vector<double> precision, recall, f1;
  double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
};

/// Precision, recall and F1 per class with the 0/0 -> 0 convention.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm);

/// Mean over classes of (TPR + TNR)/2.
double balanced_accuracy(const ConfusionMatrix& cm);

/// Cohen's kappa (p0 - pe)/(1 - pe) with pe = sum_i A_i*B_i / n^2; 0 when
/// pe = 1 or the matrix is empty.
double kappa(const ConfusionMatrix& cm);

struct MacroMetrics {
  double mcc = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
  double balanced_accuracy = 0.0, kappa = 0.0;
};

struct ClassMetrics {
  double mcc = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct MetricReport {
  std::int64_t n = 0;
  std::vector<ClassMetrics> per_class;
  MacroMetrics macro;
};

MetricReport compute_report(const ConfusionMatrix& cm);

/// k disjoint index sets partitioning the dataset.
struct FoldAssignment {
  std::vector<std::vector<int>> folds;
};

/// Class-stratified, seed-deterministic k-fold partition of a labeled index
/// set. Per-class and total fold sizes each differ by at most one. Throws
/// SplitError when some class has fewer than k members.
FoldAssignment crossval_split(const std::vector<int>& labels, int num_classes, int k,
                              std::uint64_t seed);

/// Stratifies over the manifest's entry labels.
FoldAssignment crossval_split(const DatasetManifest& manifest, int k, std::uint64_t seed);

} // namespace ctqc
