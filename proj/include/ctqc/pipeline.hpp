#pragma once

#include <vector>

#include "ctqc/volume.hpp"

namespace ctqc {

/// How detected dark slices are fixed. Rescale multiplies the slice so its
/// mean matches the neighbor-mean target and preserves relative contrast;
/// Replace substitutes the pixelwise mean of the valid neighbors.
enum class RepairMode { Rescale, Replace };

struct PipelineConfig {
  double trim_fraction = 0.25;
  int target_slices = 10;
  int resize_to = 224;
  int window = 3;
  double darkness_ratio = 0.7;
  RepairMode repair_mode = RepairMode::Rescale; // not part of the JSON schema

  void validate() const;
};

/// Fixed-count stack of normalized square slices, the classifier input unit.
/// Every pixel is in [0, 1].
struct SliceStack {
  std::vector<Image> slices;
  std::string patient_id;
  std::optional<SeverityLabel> label;
};

struct QcReport {
  std::vector<double> per_slice_mean_brightness; // after repair
  std::vector<int> anomalous_indices;            // one entry per repair applied
  std::vector<int> degenerate_slices;            // constant slices zeroed by normalization
  int repairs_applied = 0;
};

/// Keeps z-indices [ceil(fraction*nz), nz - ceil(fraction*nz)).
/// Throws PipelineError(EmptyResult) when nothing remains.
VoxelVolume trim_slices(const VoxelVolume& vol, double fraction);

/// Resamples to exactly n slices. Output slice k is sampled at continuous
/// z-position k*(nz-1)/(n-1) (the volume center when n = 1) by per-pixel
/// linear interpolation between the two bracketing input slices.
VoxelVolume resample_slices(const VoxelVolume& vol, int n);

/// Min-max normalization x* = (x - min)/(max - min). A constant slice maps to
/// all zeros and sets the degenerate flag instead of failing.
Image minmax_normalize(const Image& slice, bool& degenerate);
Image minmax_normalize(const Image& slice);

/// Indices i whose mean brightness falls below ratio times the median mean
/// brightness of the window centered at i (i itself excluded, window clipped
/// at the boundaries). Brightness values are assumed nonnegative.
std::vector<int> detect_dark_slices(const VoxelVolume& vol, int window, double ratio);

/// Fixes slice idx so its mean brightness equals the mean of the adjacent
/// valid slices' means; slices listed in exclude (e.g. other detections) are
/// not used as neighbors. Throws PipelineError(NoValidNeighbor) when no
/// neighbor qualifies.
VoxelVolume repair_slice(const VoxelVolume& vol, int idx, const std::vector<int>& exclude = {},
                         RepairMode mode = RepairMode::Rescale);

/// Bilinear resampling of one slice onto a side x side grid.
Image resize_slice(const Image& slice, int side);

/// Full standardization: trim -> resample -> detect+repair (at most 3 passes)
/// -> per-slice min-max normalize -> resize.
std::pair<SliceStack, QcReport> run_pipeline(const VoxelVolume& vol, const PipelineConfig& cfg);

} // namespace ctqc
