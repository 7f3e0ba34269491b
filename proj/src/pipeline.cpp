#include "ctqc/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace ctqc {

namespace {

// Ceiling with a guard against FP noise in fraction*nz (e.g. 0.1*30).
int trim_count(double fraction, int nz) {
  return static_cast<int>(std::ceil(fraction * nz - 1e-9));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

void PipelineConfig::validate() const {
  if (trim_fraction < 0.0 || trim_fraction >= 0.5)
    throw ConfigError("trim_fraction must be in [0, 0.5)");
  if (target_slices < 1) throw ConfigError("target_slices must be positive");
  if (resize_to < 1) throw ConfigError("resize_to must be positive");
  if (window < 3 || window % 2 == 0) throw ConfigError("window must be odd and >= 3");
  if (darkness_ratio <= 0.0 || darkness_ratio >= 1.0)
    throw ConfigError("darkness_ratio must be in (0, 1)");
}

VoxelVolume trim_slices(const VoxelVolume& vol, double fraction) {
  if (fraction < 0.0 || fraction >= 0.5)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "trim fraction must be in [0, 0.5)");
  const int k = trim_count(fraction, vol.nz);
  const int lo = k, hi = vol.nz - k;
  if (hi <= lo)
    throw PipelineError(PipelineError::Code::EmptyResult,
                        "trimming " + std::to_string(k) + " slices from both ends of nz=" +
                            std::to_string(vol.nz) + " leaves nothing");
  VoxelVolume out(vol.nx, vol.ny, hi - lo);
  out.patient_id = vol.patient_id;
  out.label = vol.label;
  const std::size_t stride = static_cast<std::size_t>(vol.nx) * vol.ny;
  std::copy(vol.voxels.begin() + static_cast<std::ptrdiff_t>(stride) * lo,
            vol.voxels.begin() + static_cast<std::ptrdiff_t>(stride) * hi, out.voxels.begin());
  return out;
}

VoxelVolume resample_slices(const VoxelVolume& vol, int n) {
  if (n < 1)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "slice count must be positive");
  VoxelVolume out(vol.nx, vol.ny, n);
  out.patient_id = vol.patient_id;
  out.label = vol.label;
  const std::size_t stride = static_cast<std::size_t>(vol.nx) * vol.ny;
  for (int k = 0; k < n; ++k) {
    const double pos = n > 1 ? static_cast<double>(k) * (vol.nz - 1) / (n - 1) : (vol.nz - 1) / 2.0;
    const int z0 = static_cast<int>(std::floor(pos));
    const int z1 = std::min(z0 + 1, vol.nz - 1);
    const double w = pos - z0;
    const double* a = vol.voxels.data() + stride * z0;
    const double* b = vol.voxels.data() + stride * z1;
    double* dst = out.voxels.data() + stride * k;
    if (w == 0.0) {
      std::copy(a, a + stride, dst);
    } else {
      for (std::size_t i = 0; i < stride; ++i) dst[i] = (1.0 - w) * a[i] + w * b[i];
    }
  }
  return out;
}

Image minmax_normalize(const Image& slice, bool& degenerate) {
  if (slice.pixels.empty())
    throw ArgumentError(ArgumentError::Code::EmptyInput, "cannot normalize an empty slice");
  const double lo = image_min(slice);
  const double hi = image_max(slice);
  degenerate = (hi == lo);
  Image out(slice.rows, slice.cols);
  if (degenerate) return out;
  const double range = hi - lo;
  for (std::size_t i = 0; i < slice.pixels.size(); ++i)
    out.pixels[i] = (slice.pixels[i] - lo) / range;
  return out;
}

Image minmax_normalize(const Image& slice) {
  bool degenerate = false;
  return minmax_normalize(slice, degenerate);
}

std::vector<int> detect_dark_slices(const VoxelVolume& vol, int window, double ratio) {
  if (window < 3 || window % 2 == 0)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "window must be odd and >= 3");
  if (ratio <= 0.0 || ratio >= 1.0)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "ratio must be in (0, 1)");

  std::vector<double> means(vol.nz);
  for (int z = 0; z < vol.nz; ++z) means[z] = vol.slice_mean(z);

  const int half = window / 2;
  std::vector<int> anomalous;
  for (int i = 0; i < vol.nz; ++i) {
    std::vector<double> neighbors;
    for (int j = std::max(0, i - half); j <= std::min(vol.nz - 1, i + half); ++j)
      if (j != i) neighbors.push_back(means[j]);
    if (neighbors.empty()) continue;
    if (means[i] < ratio * median(std::move(neighbors))) anomalous.push_back(i);
  }
  return anomalous;
}

VoxelVolume repair_slice(const VoxelVolume& vol, int idx, const std::vector<int>& exclude, RepairMode mode) {
  if (idx < 0 || idx >= vol.nz)
    throw ArgumentError(ArgumentError::Code::ClassOutOfRange, "slice index out of range");
  std::vector<int> neighbors;
  for (int j : {idx - 1, idx + 1})
    if (j >= 0 && j < vol.nz && std::find(exclude.begin(), exclude.end(), j) == exclude.end())
      neighbors.push_back(j);
  if (neighbors.empty())
    throw PipelineError(PipelineError::Code::NoValidNeighbor,
                        "slice " + std::to_string(idx) + " has no valid neighbor to repair from");

  VoxelVolume out = vol;
  const std::size_t stride = static_cast<std::size_t>(vol.nx) * vol.ny;
  if (mode == RepairMode::Replace) {
    double* dst = out.voxels.data() + stride * idx;
    std::fill(dst, dst + stride, 0.0);
    for (int j : neighbors) {
      const double* src = vol.voxels.data() + stride * j;
      for (std::size_t i = 0; i < stride; ++i) dst[i] += src[i] / neighbors.size();
    }
    return out;
  }

  double target = 0.0;
  for (int j : neighbors) target += vol.slice_mean(j);
  target /= static_cast<double>(neighbors.size());

  const double current = vol.slice_mean(idx);
  if (std::abs(current) < 1e-300) {
    // Nothing to rescale; fall back to a constant fill at the target level.
    double* dst = out.voxels.data() + stride * idx;
    std::fill(dst, dst + stride, target);
  } else {
    out.scale_slice(idx, target / current);
  }
  return out;
}

Image resize_slice(const Image& slice, int side) {
  if (side < 1)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "side must be positive");
  return bilinear_resize(slice, side, side);
}

std::pair<SliceStack, QcReport> run_pipeline(const VoxelVolume& vol, const PipelineConfig& cfg) {
  cfg.validate();
  VoxelVolume work = resample_slices(trim_slices(vol, cfg.trim_fraction), cfg.target_slices);

  QcReport report;
  for (int pass = 0; pass < 3; ++pass) {
    const std::vector<int> anomalies = detect_dark_slices(work, cfg.window, cfg.darkness_ratio);
    if (anomalies.empty()) break;
    std::vector<int> pending = anomalies;
    for (int idx : anomalies) {
      // A slice repaired earlier in this pass counts as a valid neighbor again.
      pending.erase(std::find(pending.begin(), pending.end(), idx));
      work = repair_slice(work, idx, pending, cfg.repair_mode);
      report.anomalous_indices.push_back(idx);
      ++report.repairs_applied;
    }
  }

  report.per_slice_mean_brightness.resize(work.nz);
  for (int z = 0; z < work.nz; ++z) report.per_slice_mean_brightness[z] = work.slice_mean(z);

  SliceStack stack;
  stack.patient_id = vol.patient_id;
  stack.label = vol.label;
  stack.slices.reserve(static_cast<std::size_t>(cfg.target_slices));
  for (int z = 0; z < work.nz; ++z) {
    bool degenerate = false;
    Image normalized = minmax_normalize(work.slice(z), degenerate);
    if (degenerate) report.degenerate_slices.push_back(z);
    stack.slices.push_back(resize_slice(normalized, cfg.resize_to));
  }
  return {std::move(stack), std::move(report)};
}

} // namespace ctqc
