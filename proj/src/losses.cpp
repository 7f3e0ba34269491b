#include "ctqc/losses.hpp"

#include <algorithm>
#include <cmath>

namespace ctqc {

namespace {

// log softmax(u)[label] and the full softmax, with max subtraction.
struct Softmax {
  std::vector<double> p;
  double log_p_label;
};

Softmax stable_softmax(std::span<const double> u, int label) {
  const double m = *std::max_element(u.begin(), u.end());
  double sum = 0.0;
  std::vector<double> e(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    e[i] = std::exp(u[i] - m);
    sum += e[i];
  }
  Softmax out;
  out.p.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out.p[i] = e[i] / sum;
  out.log_p_label = u[label] - m - std::log(sum);
  return out;
}

void check_label(std::span<const double> logits, int label) {
  if (logits.empty())
    throw ArgumentError(ArgumentError::Code::EmptyInput, "empty logits");
  if (label < 0 || label >= static_cast<int>(logits.size()))
    throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "label out of range");
}

} // namespace

void ClassStats::validate() const {
  if (counts.size() < 2)
    throw ConfigError("class stats need at least two classes");
  for (long n : counts)
    if (n < 1) throw ConfigError("every class count must be >= 1");
}

ClassStats ClassStats::from_labels(const std::vector<int>& labels, int k) {
  ClassStats stats;
  stats.counts.assign(static_cast<std::size_t>(k), 0);
  for (int label : labels) {
    if (label < 0 || label >= k)
      throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "label out of range");
    ++stats.counts[static_cast<std::size_t>(label)];
  }
  stats.validate();
  return stats;
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::Ce: return "ce";
    case LossKind::Ldam: return "ldam";
    case LossKind::Focal: return "focal";
    case LossKind::CbCe: return "cb_ce";
    case LossKind::CbLdam: return "cb_ldam";
    case LossKind::CbFocal: return "cb_focal";
  }
  return "?";
}

LossKind loss_kind_from_string(const std::string& text) {
  if (text == "ce") return LossKind::Ce;
  if (text == "ldam") return LossKind::Ldam;
  if (text == "focal") return LossKind::Focal;
  if (text == "cb_ce") return LossKind::CbCe;
  if (text == "cb_ldam") return LossKind::CbLdam;
  if (text == "cb_focal") return LossKind::CbFocal;
  throw ConfigError("unknown loss kind \"" + text + "\"");
}

std::vector<double> ldam_margins(const ClassStats& stats, double m) {
  stats.validate();
  if (m <= 0.0) throw ConfigError("LDAM margin constant m must be positive");
  std::vector<double> inv_quartic(stats.counts.size());
  for (std::size_t j = 0; j < stats.counts.size(); ++j)
    inv_quartic[j] = std::pow(static_cast<double>(stats.counts[j]), -0.25);
  const double largest = *std::max_element(inv_quartic.begin(), inv_quartic.end());
  std::vector<double> margins(inv_quartic.size());
  for (std::size_t j = 0; j < inv_quartic.size(); ++j) margins[j] = m * inv_quartic[j] / largest;
  return margins;
}

LossEvaluation ldam_loss(std::span<const double> logits, int label, std::span<const double> margins,
                         double s, ScalingMode mode) {
  check_label(logits, label);
  if (margins.size() != logits.size())
    throw ArgumentError(ArgumentError::Code::DimensionMismatch, "margins/logits size mismatch");
  if (s <= 0.0) throw ConfigError("expanding factor s must be positive");

  const double scale = mode == ScalingMode::Divide ? 1.0 / s : s;
  std::vector<double> u(logits.begin(), logits.end());
  u[label] -= margins[label];
  for (double& v : u) v *= scale;

  const Softmax sm = stable_softmax(u, label);
  LossEvaluation out;
  out.value = -sm.log_p_label;
  out.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    out.grad[i] = scale * (sm.p[i] - (static_cast<int>(i) == label ? 1.0 : 0.0));
  return out;
}

LossEvaluation cross_entropy_loss(std::span<const double> logits, int label) {
  check_label(logits, label);
  const Softmax sm = stable_softmax(logits, label);
  LossEvaluation out;
  out.value = -sm.log_p_label;
  out.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    out.grad[i] = sm.p[i] - (static_cast<int>(i) == label ? 1.0 : 0.0);
  return out;
}

LossEvaluation focal_loss(std::span<const double> logits, int label, double gamma) {
  check_label(logits, label);
  if (gamma < 0.0) throw ConfigError("focal gamma must be nonnegative");
  if (gamma == 0.0) return cross_entropy_loss(logits, label);

  const Softmax sm = stable_softmax(logits, label);
  const double log_pt = sm.log_p_label;
  const double pt = std::exp(log_pt);
  const double miss = -std::expm1(log_pt); // 1 - p_t, accurate near 1

  LossEvaluation out;
  out.grad.assign(logits.size(), 0.0);
  if (miss <= 0.0) {
    out.value = 0.0; // exact hit; both factors vanish
    return out;
  }
  const double miss_pow = std::pow(miss, gamma);
  out.value = -miss_pow * log_pt;

  // d loss / d p_t, with miss^{gamma-1} folded into the p_i = miss*q_i split
  // so nothing overflows when p_t approaches 1.
  const double t = miss_pow * (gamma * log_pt - miss / pt);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (static_cast<int>(i) == label) {
      out.grad[i] = pt * t;
    } else {
      out.grad[i] = -pt * (sm.p[i] / miss) * t;
    }
  }
  return out;
}

double effective_number(long n, double beta) {
  if (n < 1) throw ConfigError("effective_number requires n >= 1");
  if (beta < 0.0 || beta >= 1.0) throw ConfigError("beta must be in [0, 1)");
  if (beta == 0.0) return 1.0;
  // (1 - beta^n)/(1 - beta) via expm1/log1p for accuracy at beta near 1.
  return -std::expm1(static_cast<double>(n) * std::log1p(beta - 1.0)) / (1.0 - beta);
}

std::vector<double> cb_weights(const ClassStats& stats, double beta, bool normalize) {
  stats.validate();
  std::vector<double> weights(stats.counts.size());
  for (std::size_t j = 0; j < stats.counts.size(); ++j)
    weights[j] = 1.0 / effective_number(stats.counts[j], beta);
  if (normalize) {
    double sum = 0.0;
    for (double w : weights) sum += w;
    const double k = static_cast<double>(weights.size());
    for (double& w : weights) w *= k / sum;
  }
  return weights;
}

LossEvaluation weighted_loss(LossEvaluation base, double weight) {
  if (weight <= 0.0) throw ConfigError("loss weight must be positive");
  base.value *= weight;
  for (double& g : base.grad) g *= weight;
  return base;
}

LossFn make_loss(LossKind kind, const ClassStats& stats, const LossParams& params) {
  stats.validate();
  const std::size_t k = stats.counts.size();
  const auto check_k = [k](std::span<const double> logits) {
    if (logits.size() != k)
      throw ArgumentError(ArgumentError::Code::DimensionMismatch, "logits length does not match class count");
  };

  switch (kind) {
    case LossKind::Ce:
      return [check_k](std::span<const double> logits, int label) {
        check_k(logits);
        return cross_entropy_loss(logits, label);
      };
    case LossKind::Ldam: {
      const std::vector<double> margins = ldam_margins(stats, params.ldam.m);
      const double s = params.ldam.s;
      const ScalingMode mode = params.ldam.scaling_mode;
      if (s <= 0.0) throw ConfigError("expanding factor s must be positive");
      return [check_k, margins, s, mode](std::span<const double> logits, int label) {
        check_k(logits);
        return ldam_loss(logits, label, margins, s, mode);
      };
    }
    case LossKind::Focal: {
      const double gamma = params.focal.gamma;
      if (gamma < 0.0) throw ConfigError("focal gamma must be nonnegative");
      return [check_k, gamma](std::span<const double> logits, int label) {
        check_k(logits);
        return focal_loss(logits, label, gamma);
      };
    }
    case LossKind::CbCe:
    case LossKind::CbLdam:
    case LossKind::CbFocal: {
      const std::vector<double> weights = cb_weights(stats, params.cb.beta, params.cb.normalize);
      const LossKind base_kind = kind == LossKind::CbCe    ? LossKind::Ce
                                 : kind == LossKind::CbLdam ? LossKind::Ldam
                                                            : LossKind::Focal;
      const LossFn base = make_loss(base_kind, stats, params);
      return [weights, base](std::span<const double> logits, int label) {
        LossEvaluation eval = base(logits, label);
        return weighted_loss(std::move(eval), weights[static_cast<std::size_t>(label)]);
      };
    }
  }
  throw ConfigError("unknown loss kind");
}

} // namespace ctqc
