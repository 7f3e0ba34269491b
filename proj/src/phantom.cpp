#include "ctqc/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctqc/rng.hpp"

namespace ctqc {

std::pair<int, int> lung_axis_range(int dim) {
  const int lo = static_cast<int>(std::lround(dim * 0.25));
  return {lo, dim - lo};
}

VoxelVolume synth_phantom(const PhantomSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1 || spec.nz < 1)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "phantom dims must be positive");
  if (spec.lesion_fraction < 0.0 || spec.lesion_fraction >= 1.0)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "lesion_fraction must be in [0, 1)");

  VoxelVolume vol(spec.nx, spec.ny, spec.nz, phantom_levels::kBody);
  vol.patient_id = "phantom-" + std::to_string(spec.seed);
  vol.label = severity_from_fraction(spec.lesion_fraction);

  const auto [x0, x1] = lung_axis_range(spec.nx);
  const auto [y0, y1] = lung_axis_range(spec.ny);
  const auto [z0, z1] = lung_axis_range(spec.nz);

  std::vector<std::size_t> lung_voxels;
  for (int z = z0; z < z1; ++z)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) {
        const std::size_t idx = static_cast<std::size_t>(x) + static_cast<std::size_t>(spec.nx) * (y + static_cast<std::size_t>(spec.ny) * z);
        vol.voxels[idx] = phantom_levels::kLung;
        lung_voxels.push_back(idx);
      }

  Rng rng(spec.seed);
  rng.shuffle(lung_voxels);
  const std::size_t lesion_count =
      static_cast<std::size_t>(std::floor(spec.lesion_fraction * static_cast<double>(lung_voxels.size())));
  for (std::size_t i = 0; i < lesion_count; ++i)
    vol.voxels[lung_voxels[i]] = phantom_levels::kLesion;

  if (spec.noise_level > 0.0) {
    for (double& v : vol.voxels)
      v = std::max(0.0, v + spec.noise_level * rng.gaussian());
  }
  return vol;
}

} // namespace ctqc
