#pragma once

#include "ctqc/volume.hpp"

namespace ctqc {

/// Intensity levels of the synthetic phantom, on a nonnegative
/// Hounsfield-like scale (offset so that slice brightness ratios are
/// meaningful to the dark-slice detector).
namespace phantom_levels {
inline constexpr double kBody = 900.0;
inline constexpr double kLung = 200.0;
inline constexpr double kLesion = 700.0;
} // namespace phantom_levels

/// Axis range [lo, hi) of the central lung box: the middle 50% of the axis.
std::pair<int, int> lung_axis_range(int dim);

/// Generates a deterministic synthetic CT phantom. A central box spanning the
/// middle 50% of each axis is the "lung"; exactly
/// floor(lesion_fraction * region_size) of its voxels are elevated to lesion
/// intensity, chosen by a seeded shuffle. Gaussian noise of the given level is
/// added everywhere and clamped at zero. The label follows the severity
/// banding of lesion_fraction.
VoxelVolume synth_phantom(const PhantomSpec& spec);

} // namespace ctqc
