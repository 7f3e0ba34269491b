#include "ctqc/gan.hpp"

#include <cmath>
#include <string>

#include "ctqc/rng.hpp"

namespace ctqc {

BinaryMask::BinaryMask(Image img) : values(std::move(img)) {
  for (double v : values.pixels)
    if (v != 0.0 && v != 1.0)
      throw ArgumentError(ArgumentError::Code::ShapeMismatch, "mask values must be exactly 0 or 1");
}

BinaryMask BinaryMask::ones(int rows, int cols) { return BinaryMask(Image(rows, cols, 1.0)); }
BinaryMask BinaryMask::zeros(int rows, int cols) { return BinaryMask(Image(rows, cols, 0.0)); }

Image apply_mask(const Image& x, const BinaryMask& m, double tau) {
  if (!x.same_shape(m.values))
    throw ArgumentError(ArgumentError::Code::ShapeMismatch, "image and mask shapes differ");
  Image out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.pixels.size(); ++i)
    out.pixels[i] = x.pixels[i] * m.values.pixels[i] + tau * (1.0 - m.values.pixels[i]);
  return out;
}

namespace {

template <typename Batch, typename Eval>
double batch_mean(const Batch& batch, const Eval& eval) {
  double sum = 0.0;
  for (const auto& item : batch) sum += eval(item);
  return sum / static_cast<double>(batch.size());
}

void require_nonempty(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0)
    throw ArgumentError(ArgumentError::Code::EmptyBatch, "batches must be nonempty");
}

} // namespace

double misgan_data_loss(const NetworkEval& d, const MaskedBatch& real_batch,
                        const MaskedBatch& fake_batch, double tau) {
  require_nonempty(real_batch.size(), fake_batch.size());
  const auto eval = [&](const std::pair<Image, BinaryMask>& item) {
    return d.discriminator(apply_mask(item.first, item.second, tau));
  };
  return batch_mean(real_batch, eval) - batch_mean(fake_batch, eval);
}

double misgan_mask_loss(const NetworkEval& d_m, const std::vector<BinaryMask>& real_masks,
                        const std::vector<BinaryMask>& fake_masks) {
  require_nonempty(real_masks.size(), fake_masks.size());
  const auto eval = [&](const BinaryMask& m) { return d_m.discriminator(m.values); };
  return batch_mean(real_masks, eval) - batch_mean(fake_masks, eval);
}

double misgan_imputer_loss(const NetworkEval& d_i, const std::vector<Image>& gen_batch,
                           const std::vector<Image>& imputed_batch) {
  require_nonempty(gen_batch.size(), imputed_batch.size());
  const auto eval = [&](const Image& img) { return d_i.discriminator(img); };
  return batch_mean(gen_batch, eval) - batch_mean(imputed_batch, eval);
}

MisganObjectives combined_objectives(const MisganLosses& losses, double zeta, double phi) {
  if (zeta < 0.0 || phi < 0.0)
    throw ConfigError("zeta and phi must be nonnegative");
  MisganObjectives obj;
  obj.mask = losses.mask + zeta * losses.data;
  obj.data = losses.data + phi * losses.imputer;
  obj.imputer = losses.imputer;
  return obj;
}

double residual_loss(const Image& x, const Image& gz) {
  if (!x.same_shape(gz))
    throw ArgumentError(ArgumentError::Code::ShapeMismatch, "query and reconstruction shapes differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) sum += std::abs(x.pixels[i] - gz.pixels[i]);
  return sum;
}

double discrimination_loss(const std::vector<double>& fx, const std::vector<double>& fgz) {
  if (fx.size() != fgz.size())
    throw ArgumentError(ArgumentError::Code::LengthMismatch, "feature vectors have different lengths");
  double sum = 0.0;
  for (std::size_t i = 0; i < fx.size(); ++i) sum += std::abs(fx[i] - fgz[i]);
  return sum;
}

void AnoSearchConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0, 1]");
  if (restarts < 1) throw ConfigError("restarts must be positive");
  if (iterations < 0) throw ConfigError("iterations must be nonnegative");
  if (step_decay <= 0.0 || step_decay >= 1.0) throw ConfigError("step_decay must be in (0, 1)");
  if (initial_step <= 0.0) throw ConfigError("initial_step must be positive");
}

AnomalyResult anomaly_score(const Image& x, const std::vector<double>& z, const NetworkEval& nets,
                            double lambda, bool normalize) {
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0, 1]");
  const Image gz = nets.generator(z);
  AnomalyResult result;
  result.z_star = z;
  result.residual = residual_loss(x, gz);
  if (normalize) result.residual /= static_cast<double>(x.size());
  if (lambda > 0.0) {
    const std::vector<double> fx = nets.feature_map(x);
    const std::vector<double> fgz = nets.feature_map(gz);
    result.discrimination = discrimination_loss(fx, fgz);
    if (normalize && !fx.empty()) result.discrimination /= static_cast<double>(fx.size());
  }
  result.score = (1.0 - lambda) * result.residual + lambda * result.discrimination;
  return result;
}

AnomalyResult latent_search(const Image& x, const NetworkEval& nets, const AnoSearchConfig& cfg,
                            const SearchTrace& trace) {
  cfg.validate();
  if (nets.latent_dim < 1)
    throw ArgumentError(ArgumentError::Code::DimensionMismatch, "generator has no latent dimension");

  const auto score_at = [&](const std::vector<double>& z) {
    return anomaly_score(x, z, nets, cfg.lambda, cfg.normalize);
  };

  Rng rng(cfg.seed);
  AnomalyResult best;
  bool have_best = false;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<double> z(static_cast<std::size_t>(nets.latent_dim));
    for (double& v : z) v = rng.gaussian();

    AnomalyResult current = score_at(z);
    if (trace) trace(restart, -1, current.score);

    double step = cfg.initial_step;
    for (int sweep = 0; sweep < cfg.iterations; ++sweep) {
      bool improved = false;
      for (int j = 0; j < nets.latent_dim; ++j) {
        for (const double delta : {step, -step}) {
          std::vector<double> probe = current.z_star;
          probe[static_cast<std::size_t>(j)] += delta;
          AnomalyResult candidate = score_at(probe);
          if (candidate.score < current.score) {
            current = std::move(candidate);
            improved = true;
            if (trace) trace(restart, sweep, current.score);
            break;
          }
        }
      }
      if (!improved) step *= cfg.step_decay;
    }

    if (!have_best || current.score < best.score) {
      best = std::move(current);
      have_best = true;
    }
  }
  return best;
}

AnomalyCall threshold_classify(double score, double threshold) {
  return score > threshold ? AnomalyCall::Abnormal : AnomalyCall::Normal;
}

void AffineGeneratorParams::validate() const {
  if (latent_dim < 1 || rows < 1 || cols < 1)
    throw ParseError(ParseError::Code::Malformed, "affine generator dimensions must be positive");
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  if (a.size() != pixels * static_cast<std::size_t>(latent_dim) || b.size() != pixels)
    throw ParseError(ParseError::Code::Malformed, "affine generator parameter sizes inconsistent");
}

NetworkEval make_affine_network(const AffineGeneratorParams& params) {
  params.validate();
  NetworkEval nets;
  nets.latent_dim = params.latent_dim;
  nets.generator = [params](const std::vector<double>& z) {
    if (z.size() != static_cast<std::size_t>(params.latent_dim))
      throw ArgumentError(ArgumentError::Code::DimensionMismatch, "latent vector has wrong length");
    Image img(params.rows, params.cols);
    for (std::size_t p = 0; p < img.pixels.size(); ++p) {
      double v = params.b[p];
      const double* row = params.a.data() + p * static_cast<std::size_t>(params.latent_dim);
      for (int j = 0; j < params.latent_dim; ++j) v += row[j] * z[static_cast<std::size_t>(j)];
      img.pixels[p] = v;
    }
    return img;
  };
  nets.feature_map = [](const Image& img) { return img.pixels; };
  nets.discriminator = [](const Image& img) { return image_mean(img); };
  return nets;
}

} // namespace ctqc
