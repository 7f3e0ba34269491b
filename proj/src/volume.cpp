#include "ctqc/volume.hpp"

namespace ctqc {

std::string to_string(SeverityLabel label) {
  switch (label) {
    case SeverityLabel::CT0: return "CT0";
    case SeverityLabel::CT1: return "CT1";
    case SeverityLabel::CT2: return "CT2";
    case SeverityLabel::CT3: return "CT3";
  }
  return "CT?";
}

std::optional<SeverityLabel> label_from_string(const std::string& text) {
  if (text == "CT0") return SeverityLabel::CT0;
  if (text == "CT1") return SeverityLabel::CT1;
  if (text == "CT2") return SeverityLabel::CT2;
  if (text == "CT3") return SeverityLabel::CT3;
  return std::nullopt;
}

Image VoxelVolume::slice(int z) const {
  Image img(ny, nx);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      img.at(y, x) = at(x, y, z);
  return img;
}

void VoxelVolume::set_slice(int z, const Image& img) {
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      at(x, y, z) = img.at(y, x);
}

double VoxelVolume::slice_mean(int z) const {
  const std::size_t stride = static_cast<std::size_t>(nx) * ny;
  const double* base = voxels.data() + stride * z;
  double sum = 0.0;
  for (std::size_t i = 0; i < stride; ++i) sum += base[i];
  return sum / static_cast<double>(stride);
}

void VoxelVolume::scale_slice(int z, double factor) {
  const std::size_t stride = static_cast<std::size_t>(nx) * ny;
  double* base = voxels.data() + stride * z;
  for (std::size_t i = 0; i < stride; ++i) base[i] *= factor;
}

SeverityLabel severity_from_fraction(double lesion_fraction) {
  if (lesion_fraction <= 0.0) return SeverityLabel::CT0;
  if (lesion_fraction <= 0.25) return SeverityLabel::CT1;
  if (lesion_fraction <= 0.5) return SeverityLabel::CT2;
  return SeverityLabel::CT3;
}

} // namespace ctqc
