#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ctqc/errors.hpp"

namespace ctqc {

/// Per-class training sample counts. All counts must be >= 1 and K >= 2.
struct ClassStats {
  std::vector<long> counts;

  int num_classes() const { return static_cast<int>(counts.size()); }
  void validate() const;

  static ClassStats from_labels(const std::vector<int>& labels, int k);
};

/// Where the expanding factor s sits in the margin loss exponent. Divide
/// follows the printed equation (z/s); Multiply follows the expanding-factor
/// convention (s*z).
enum class ScalingMode { Divide, Multiply };

struct LdamConfig {
  double m = 0.3;
  double s = 50.0;
  ScalingMode scaling_mode = ScalingMode::Divide;
};

struct FocalConfig {
  double gamma = 0.02;
};

struct CbConfig {
  double beta = 0.999;
  bool normalize = true; // rescale weights to sum to K
};

/// Scalar loss value plus the analytic gradient with respect to the logits.
struct LossEvaluation {
  double value = 0.0;
  std::vector<double> grad;
};

enum class LossKind { Ce, Ldam, Focal, CbCe, CbLdam, CbFocal };

std::string to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& text);

/// Per-class margins delta_j = m * n_j^{-1/4} / max_k n_k^{-1/4}: the rarest
/// class receives the full margin m.
std::vector<double> ldam_margins(const ClassStats& stats, double m);

/// Margin softmax cross-entropy: the true-class logit is shifted by its
/// margin and all logits are rescaled by s before the softmax.
LossEvaluation ldam_loss(std::span<const double> logits, int label, std::span<const double> margins,
                         double s, ScalingMode mode);

LossEvaluation cross_entropy_loss(std::span<const double> logits, int label);

/// -(1 - p_t)^gamma * log(p_t) with p_t the softmax probability of the label.
LossEvaluation focal_loss(std::span<const double> logits, int label, double gamma);

/// Effective number of samples (1 - beta^n) / (1 - beta), the n-term
/// geometric sum of beta.
double effective_number(long n, double beta);

/// Inverse effective-number weights (1 - beta)/(1 - beta^{n_j}); when
/// normalize is set they are rescaled to sum to K.
std::vector<double> cb_weights(const ClassStats& stats, double beta, bool normalize = true);

LossEvaluation weighted_loss(LossEvaluation base, double weight);

/// Deterministic per-sample loss handle: (logits, label) -> LossEvaluation.
using LossFn = std::function<LossEvaluation(std::span<const double>, int)>;

struct LossParams {
  LdamConfig ldam;
  FocalConfig focal;
  CbConfig cb;
};

/// Builds the requested loss over K = stats.num_classes() classes. The cb_*
/// variants multiply the base loss by the class-balanced weight of the label.
/// Throws ConfigError when the configs are inconsistent with the kind.
LossFn make_loss(LossKind kind, const ClassStats& stats, const LossParams& params);

} // namespace ctqc
