#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ctqc/image.hpp"

namespace ctqc {

/// Mask over an image; values are exactly 0 or 1.
struct BinaryMask {
  Image values;

  BinaryMask() = default;
  explicit BinaryMask(Image img);

  static BinaryMask ones(int rows, int cols);
  static BinaryMask zeros(int rows, int cols);
};

/// Abstract evaluator contract for the GAN roles. Instances must be
/// deterministic functions of their inputs with fixed shapes.
struct NetworkEval {
  int latent_dim = 0;
  std::function<Image(const std::vector<double>&)> generator;
  std::function<double(const Image&)> discriminator;
  std::function<std::vector<double>(const Image&)> feature_map;
  std::function<BinaryMask(const std::vector<double>&)> mask_generator;
  std::function<Image(const Image&, const BinaryMask&, const std::vector<double>&)> imputer;
};

/// Masking operator x (.) m + tau * (1 - m).
Image apply_mask(const Image& x, const BinaryMask& m, double tau);

using MaskedBatch = std::vector<std::pair<Image, BinaryMask>>;

/// Data-GAN loss: mean_real D(f_tau(x, m)) - mean_fake D(f_tau(gx, gm)).
double misgan_data_loss(const NetworkEval& d, const MaskedBatch& real_batch,
                        const MaskedBatch& fake_batch, double tau);

/// Mask-GAN loss: mean D_m(real masks) - mean D_m(fake masks).
double misgan_mask_loss(const NetworkEval& d_m, const std::vector<BinaryMask>& real_masks,
                        const std::vector<BinaryMask>& fake_masks);

/// Imputer loss: mean D_i(generated) - mean D_i(imputed).
double misgan_imputer_loss(const NetworkEval& d_i, const std::vector<Image>& gen_batch,
                           const std::vector<Image>& imputed_batch);

struct MisganLosses {
  double data = 0.0;    // L_x
  double mask = 0.0;    // L_m
  double imputer = 0.0; // L_i
};

struct MisganObjectives {
  double data = 0.0;    // L_x + phi * L_i
  double mask = 0.0;    // L_m + zeta * L_x
  double imputer = 0.0; // L_i
};

/// Per-player objectives of the alternating optimization.
MisganObjectives combined_objectives(const MisganLosses& losses, double zeta, double phi);

/// Sum of absolute pixel differences between the query and reconstruction.
double residual_loss(const Image& x, const Image& gz);

/// Sum of absolute differences of discriminator features (feature matching).
double discrimination_loss(const std::vector<double>& fx, const std::vector<double>& fgz);

struct AnoSearchConfig {
  double lambda = 0.1;
  int restarts = 8;
  int iterations = 200; // coordinate sweeps per restart
  double step_decay = 0.5;
  double initial_step = 0.5;
  std::uint64_t seed = 0;
  bool normalize = false; // mean-per-pixel instead of raw sums

  void validate() const;
};

struct AnomalyResult {
  double score = 0.0;
  std::vector<double> z_star;
  double residual = 0.0;
  double discrimination = 0.0;
};

/// (1 - lambda) * residual + lambda * discrimination at a fixed latent point.
AnomalyResult anomaly_score(const Image& x, const std::vector<double>& z, const NetworkEval& nets,
                            double lambda, bool normalize = false);

/// Called after each accepted improvement and at every restart start.
using SearchTrace = std::function<void(int restart, int sweep, double best_score)>;

/// Gradient-free latent-space search: from each seeded restart, probe each
/// coordinate by +/- step, accept improvements, and shrink the step by
/// step_decay after a sweep with no improvement. Returns the best result over
/// all restarts (ties broken by lowest restart index). Deterministic given
/// cfg.seed.
AnomalyResult latent_search(const Image& x, const NetworkEval& nets, const AnoSearchConfig& cfg,
                            const SearchTrace& trace = nullptr);

enum class AnomalyCall { Normal, Abnormal };

/// Abnormal iff score > threshold (strict).
AnomalyCall threshold_classify(double score, double threshold);

/// Dense affine toy generator: image = reshape(A z + b). Row r of A holds the
/// coefficients of pixel r. Provides generator and identity feature_map.
struct AffineGeneratorParams {
  int latent_dim = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> a; // (rows*cols) x latent_dim, row-major
  std::vector<double> b; // rows*cols

  void validate() const;
};

NetworkEval make_affine_network(const AffineGeneratorParams& params);

} // namespace ctqc
