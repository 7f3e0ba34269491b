#include "ctqc/metrics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ctqc/rng.hpp"

namespace ctqc {

std::int64_t ConfusionMatrix::total() const {
  return std::accumulate(cells.begin(), cells.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(int t) const {
  std::int64_t sum = 0;
  for (int p = 0; p < k; ++p) sum += at(t, p);
  return sum;
}

std::int64_t ConfusionMatrix::col_sum(int p) const {
  std::int64_t sum = 0;
  for (int t = 0; t < k; ++t) sum += at(t, p);
  return sum;
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels, int k) {
  if (preds.size() != labels.size())
    throw ArgumentError(ArgumentError::Code::LengthMismatch,
                        "preds and labels have different lengths");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= k || labels[i] < 0 || labels[i] >= k)
      throw ArgumentError(ArgumentError::Code::ClassOutOfRange,
                          "class index out of range at position " + std::to_string(i));
    ++cm.at(labels[i], preds[i]);
  }
  return cm;
}

BinaryCounts one_vs_rest(const ConfusionMatrix& cm, int c) {
  if (c < 0 || c >= cm.k)
    throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "class index out of range");
  BinaryCounts b;
  b.tp = cm.at(c, c);
  b.fp = cm.col_sum(c) - b.tp;
  b.fn = cm.row_sum(c) - b.tp;
  b.tn = cm.total() - b.tp - b.fp - b.fn;
  return b;
}

PerClassMetric mcc(const ConfusionMatrix& cm) {
  PerClassMetric out;
  out.per_class.resize(static_cast<std::size_t>(cm.k), 0.0);
  for (int c = 0; c < cm.k; ++c) {
    const BinaryCounts b = one_vs_rest(cm, c);
    const double denom2 = static_cast<double>(b.tp + b.fp) * static_cast<double>(b.tp + b.fn) *
                          static_cast<double>(b.tn + b.fp) * static_cast<double>(b.tn + b.fn);
    if (denom2 > 0.0)
      out.per_class[c] =
          (static_cast<double>(b.tp) * b.tn - static_cast<double>(b.fp) * b.fn) / std::sqrt(denom2);
  }
  out.macro = std::accumulate(out.per_class.begin(), out.per_class.end(), 0.0) / cm.k;
  return out;
}

namespace {
double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
} // namespace

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm) {
  PrecisionRecallF1 out;
  out.precision.resize(cm.k);
  out.recall.resize(cm.k);
  out.f1.resize(cm.k);
  for (int c = 0; c < cm.k; ++c) {
    const BinaryCounts b = one_vs_rest(cm, c);
    out.precision[c] = safe_div(static_cast<double>(b.tp), static_cast<double>(b.tp + b.fp));
    out.recall[c] = safe_div(static_cast<double>(b.tp), static_cast<double>(b.tp + b.fn));
    out.f1[c] = safe_div(2.0 * out.precision[c] * out.recall[c], out.precision[c] + out.recall[c]);
  }
  out.macro_precision = std::accumulate(out.precision.begin(), out.precision.end(), 0.0) / cm.k;
  out.macro_recall = std::accumulate(out.recall.begin(), out.recall.end(), 0.0) / cm.k;
  out.macro_f1 = std::accumulate(out.f1.begin(), out.f1.end(), 0.0) / cm.k;
  return out;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  double sum = 0.0;
  for (int c = 0; c < cm.k; ++c) {
    const BinaryCounts b = one_vs_rest(cm, c);
    const double tpr = safe_div(static_cast<double>(b.tp), static_cast<double>(b.tp + b.fn));
    const double tnr = safe_div(static_cast<double>(b.tn), static_cast<double>(b.tn + b.fp));
    sum += 0.5 * (tpr + tnr);
  }
  return sum / cm.k;
}

double kappa(const ConfusionMatrix& cm) {
  const std::int64_t n = cm.total();
  if (n == 0) return 0.0;
  double trace = 0.0;
  double chance = 0.0;
  for (int c = 0; c < cm.k; ++c) {
    trace += static_cast<double>(cm.at(c, c));
    chance += static_cast<double>(cm.row_sum(c)) * static_cast<double>(cm.col_sum(c));
  }
  const double p0 = trace / static_cast<double>(n);
  const double pe = chance / (static_cast<double>(n) * static_cast<double>(n));
  if (pe == 1.0) return 0.0;
  return (p0 - pe) / (1.0 - pe);
}

MetricReport compute_report(const ConfusionMatrix& cm) {
  MetricReport report;
  report.n = cm.total();
  const PerClassMetric m = mcc(cm);
  const PrecisionRecallF1 prf = precision_recall_f1(cm);
  report.per_class.resize(static_cast<std::size_t>(cm.k));
  for (int c = 0; c < cm.k; ++c) {
    report.per_class[c].mcc = m.per_class[c];
    report.per_class[c].precision = prf.precision[c];
    report.per_class[c].recall = prf.recall[c];
    report.per_class[c].f1 = prf.f1[c];
  }
  report.macro.mcc = m.macro;
  report.macro.precision = prf.macro_precision;
  report.macro.recall = prf.macro_recall;
  report.macro.f1 = prf.macro_f1;
  report.macro.balanced_accuracy = balanced_accuracy(cm);
  report.macro.kappa = kappa(cm);
  return report;
}

FoldAssignment crossval_split(const std::vector<int>& labels, int num_classes, int k,
                              std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs k >= 2");

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "label out of range");
    by_class[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < num_classes; ++c)
    if (static_cast<int>(by_class[c].size()) < k)
      throw SplitError("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                       " samples, fewer than k=" + std::to_string(k));

  Rng rng(seed);
  FoldAssignment assignment;
  assignment.folds.resize(static_cast<std::size_t>(k));
  // Deal each class round-robin; the rotation carries across classes so that
  // total fold sizes also differ by at most one.
  int next_fold = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (int idx : members) {
      assignment.folds[static_cast<std::size_t>(next_fold)].push_back(idx);
      next_fold = (next_fold + 1) % k;
    }
  }
  return assignment;
}

FoldAssignment crossval_split(const DatasetManifest& manifest, int k, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) labels.push_back(static_cast<int>(e.label));
  return crossval_split(labels, kNumClasses, k, seed);
}

} // namespace ctqc
