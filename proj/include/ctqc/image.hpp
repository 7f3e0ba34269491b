#pragma once

#include <vector>

#include "ctqc/errors.hpp"

namespace ctqc {

/// Dense 2D scalar image, row-major.
struct Image {
  int rows = 0;
  int cols = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int rows_, int cols_, double fill = 0.0)
      : rows(rows_), cols(cols_),
        pixels(static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_), fill) {}

  double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }

  std::size_t size() const { return pixels.size(); }
  bool same_shape(const Image& other) const { return rows == other.rows && cols == other.cols; }

  bool operator==(const Image& other) const = default;
};

double image_mean(const Image& img);
double image_min(const Image& img);
double image_max(const Image& img);

/// Bilinear resampling onto an out_rows x out_cols grid with corner-aligned
/// sample positions. A single output row/column samples the input center.
Image bilinear_resize(const Image& img, int out_rows, int out_cols);

} // namespace ctqc
