#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ctqc/image.hpp"

namespace ctqc {

/// Severity classes of the four-class diagnosis task, ordered by severity.
enum class SeverityLabel : int { CT0 = 0, CT1 = 1, CT2 = 2, CT3 = 3 };

inline constexpr int kNumClasses = 4;

std::string to_string(SeverityLabel label);

/// Parses "CT0".."CT3"; returns nullopt for anything else.
std::optional<SeverityLabel> label_from_string(const std::string& text);

/// 3D scalar field in acquisition units (Hounsfield-like) plus patient
/// metadata. Voxels are stored x-fastest: index = x + nx*(y + ny*z).
struct VoxelVolume {
  int nx = 0;
  int ny = 0;
  int nz = 0;
  std::vector<double> voxels;
  std::string patient_id;
  std::optional<SeverityLabel> label;

  VoxelVolume() = default;
  VoxelVolume(int nx_, int ny_, int nz_, double fill = 0.0)
      : nx(nx_), ny(ny_), nz(nz_),
        voxels(static_cast<std::size_t>(nx_) * ny_ * nz_, fill) {}

  std::size_t voxel_count() const { return voxels.size(); }

  double& at(int x, int y, int z) {
    return voxels[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z)];
  }
  double at(int x, int y, int z) const {
    return voxels[static_cast<std::size_t>(x) + static_cast<std::size_t>(nx) * (y + static_cast<std::size_t>(ny) * z)];
  }

  /// Copies slice z out as an ny x nx image (row = y, column = x).
  Image slice(int z) const;
  void set_slice(int z, const Image& img);

  /// Mean voxel value of slice z.
  double slice_mean(int z) const;

  /// Multiplies every voxel of slice z by factor.
  void scale_slice(int z, double factor);
};

struct ManifestEntry {
  std::string path;
  SeverityLabel label;
};

/// Ordered dataset listing with per-class tallies.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::array<int, kNumClasses> class_counts{};
};

/// Parameters of the synthetic phantom generator. lesion_fraction is the
/// fraction of lung-region voxels elevated in intensity; the severity label
/// follows the dataset's banding (0 -> CT0, <=0.25 -> CT1, <=0.5 -> CT2,
/// above -> CT3).
struct PhantomSpec {
  int nx = 48;
  int ny = 48;
  int nz = 40;
  double lesion_fraction = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
};

SeverityLabel severity_from_fraction(double lesion_fraction);

} // namespace ctqc
