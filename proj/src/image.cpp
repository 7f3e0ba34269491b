#include "ctqc/image.hpp"

#include <algorithm>
#include <cmath>

namespace ctqc {

double image_mean(const Image& img) {
  if (img.pixels.empty()) return 0.0;
  double sum = 0.0;
  for (double v : img.pixels) sum += v;
  return sum / static_cast<double>(img.pixels.size());
}

double image_min(const Image& img) {
  return *std::min_element(img.pixels.begin(), img.pixels.end());
}

double image_max(const Image& img) {
  return *std::max_element(img.pixels.begin(), img.pixels.end());
}

Image bilinear_resize(const Image& img, int out_rows, int out_cols) {
  if (img.pixels.empty() || out_rows < 1 || out_cols < 1)
    throw ArgumentError(ArgumentError::Code::EmptyInput, "bilinear_resize: empty image or non-positive output shape");
  if (img.rows == out_rows && img.cols == out_cols) return img;

  Image out(out_rows, out_cols);
  const double row_scale = out_rows > 1 ? static_cast<double>(img.rows - 1) / (out_rows - 1) : 0.0;
  const double col_scale = out_cols > 1 ? static_cast<double>(img.cols - 1) / (out_cols - 1) : 0.0;
  const double row_center = (img.rows - 1) / 2.0;
  const double col_center = (img.cols - 1) / 2.0;

  for (int r = 0; r < out_rows; ++r) {
    const double src_r = out_rows > 1 ? r * row_scale : row_center;
    const int r0 = static_cast<int>(std::floor(src_r));
    const int r1 = std::min(r0 + 1, img.rows - 1);
    const double wr = src_r - r0;
    for (int c = 0; c < out_cols; ++c) {
      const double src_c = out_cols > 1 ? c * col_scale : col_center;
      const int c0 = static_cast<int>(std::floor(src_c));
      const int c1 = std::min(c0 + 1, img.cols - 1);
      const double wc = src_c - c0;
      const double top = (1.0 - wc) * img.at(r0, c0) + wc * img.at(r0, c1);
      const double bottom = (1.0 - wc) * img.at(r1, c0) + wc * img.at(r1, c1);
      out.at(r, c) = (1.0 - wr) * top + wr * bottom;
    }
  }
  return out;
}

} // namespace ctqc
