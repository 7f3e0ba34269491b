#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ctqc/phantom.hpp"
#include "ctqc/pipeline.hpp"
#include "ctqc/rng.hpp"

using namespace ctqc;

namespace {

// Volume whose slice z is constant at values[z].
VoxelVolume volume_with_slice_values(int nx, int ny, const std::vector<double>& values) {
  VoxelVolume vol(nx, ny, static_cast<int>(values.size()));
  for (int z = 0; z < vol.nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) vol.at(x, y, z) = values[static_cast<std::size_t>(z)];
  return vol;
}

// Textured volume with identical slices, so slice means are uniform but the
// content is not constant.
VoxelVolume uniform_brightness_volume(int nx, int ny, int nz) {
  VoxelVolume vol(nx, ny, nz);
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) vol.at(x, y, z) = 50.0 + 10.0 * ((x + 2 * y) % 5);
  return vol;
}

} // namespace

TEST_CASE("trim_slices keeps the middle band") {
  SUBCASE("nz=20, fraction=0.25 keeps original indices 5..14") {
    std::vector<double> values(20);
    for (int i = 0; i < 20; ++i) values[static_cast<std::size_t>(i)] = i;
    const VoxelVolume out = trim_slices(volume_with_slice_values(3, 3, values), 0.25);
    REQUIRE(out.nz == 10);
    for (int z = 0; z < 10; ++z) CHECK(out.at(0, 0, z) == 5.0 + z);
  }
  SUBCASE("fraction=0 is the identity") {
    const VoxelVolume vol = volume_with_slice_values(2, 2, {1, 2, 3});
    const VoxelVolume out = trim_slices(vol, 0.0);
    CHECK(out.voxels == vol.voxels);
  }
  SUBCASE("nz=41, fraction=0.25 keeps 19 slices starting at index 11") {
    std::vector<double> values(41);
    for (int i = 0; i < 41; ++i) values[static_cast<std::size_t>(i)] = i;
    const VoxelVolume out = trim_slices(volume_with_slice_values(2, 2, values), 0.25);
    REQUIRE(out.nz == 19);
    CHECK(out.at(0, 0, 0) == 11.0);
    CHECK(out.at(0, 0, 18) == 29.0);
  }
  SUBCASE("empty result raises") {
    CHECK_THROWS_AS(trim_slices(volume_with_slice_values(2, 2, {1.0}), 0.4), PipelineError);
  }
  SUBCASE("fp-noise fractions do not over-trim") {
    std::vector<double> values(30, 1.0);
    // 0.1*30 is just above 3.0 in double arithmetic
    const VoxelVolume out = trim_slices(volume_with_slice_values(2, 2, values), 0.1);
    CHECK(out.nz == 24);
  }
}

TEST_CASE("resample_slices linear interpolation along z") {
  SUBCASE("n equal to nz copies the input") {
    VoxelVolume vol(3, 2, 10);
    Rng rng(4);
    for (double& v : vol.voxels) v = rng.uniform(-100.0, 100.0);
    const VoxelVolume out = resample_slices(vol, 10);
    CHECK(out.voxels == vol.voxels);
  }
  SUBCASE("midpoint between two slices") {
    const VoxelVolume out = resample_slices(volume_with_slice_values(4, 4, {0, 1}), 3);
    CHECK(out.slice_mean(0) == doctest::Approx(0.0));
    CHECK(out.slice_mean(1) == doctest::Approx(0.5));
    CHECK(out.slice_mean(2) == doctest::Approx(1.0));
  }
  SUBCASE("nz=4 ramp resampled to 10 matches the piecewise-linear map") {
    const VoxelVolume out = resample_slices(volume_with_slice_values(2, 2, {0, 3, 6, 9}), 10);
    REQUIRE(out.nz == 10);
    for (int kk = 0; kk < 10; ++kk) {
      // oracle: evaluate the piecewise-linear profile at the sample position
      const double pos = kk * 3.0 / 9.0;
      const int z0 = static_cast<int>(std::floor(pos));
      const double expected = (1.0 - (pos - z0)) * (3.0 * z0) + (pos - z0) * (3.0 * std::min(z0 + 1, 3));
      CHECK(out.at(0, 0, kk) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  SUBCASE("n=1 samples the volume center") {
    const VoxelVolume out = resample_slices(volume_with_slice_values(2, 2, {0, 10, 20}), 1);
    REQUIRE(out.nz == 1);
    CHECK(out.at(0, 0, 0) == doctest::Approx(10.0));
  }
  SUBCASE("single input slice replicates") {
    const VoxelVolume out = resample_slices(volume_with_slice_values(2, 2, {7.0}), 5);
    REQUIRE(out.nz == 5);
    for (int z = 0; z < 5; ++z) CHECK(out.at(1, 1, z) == 7.0);
  }
}

TEST_CASE("minmax_normalize") {
  SUBCASE("maps [0, 500, 1000] onto [0, 0.5, 1]") {
    Image s(1, 3);
    s.pixels = {0, 500, 1000};
    const Image out = minmax_normalize(s);
    CHECK(out.pixels[0] == 0.0);
    CHECK(out.pixels[1] == doctest::Approx(0.5));
    CHECK(out.pixels[2] == 1.0);
  }
  SUBCASE("constant slice flags the degenerate range and zeroes") {
    Image s(2, 2, 7.0);
    bool degenerate = false;
    const Image out = minmax_normalize(s, degenerate);
    CHECK(degenerate);
    for (double v : out.pixels) CHECK(v == 0.0);
  }
  SUBCASE("translation invariance") {
    Image s(1, 3);
    s.pixels = {-1000, -500, 0};
    const Image out = minmax_normalize(s);
    CHECK(out.pixels[0] == 0.0);
    CHECK(out.pixels[1] == doctest::Approx(0.5));
    CHECK(out.pixels[2] == 1.0);
  }
  SUBCASE("idempotence on non-degenerate slices") {
    Rng rng(11);
    Image s(5, 7);
    for (double& v : s.pixels) v = rng.uniform(-300.0, 900.0);
    const Image once = minmax_normalize(s);
    const Image twice = minmax_normalize(once);
    for (std::size_t i = 0; i < once.pixels.size(); ++i)
      CHECK(twice.pixels[i] == doctest::Approx(once.pixels[i]).epsilon(1e-12));
  }
  SUBCASE("affine invariance") {
    Rng rng(12);
    Image s(4, 4);
    for (double& v : s.pixels) v = rng.uniform(0.0, 100.0);
    Image scaled = s;
    for (double& v : scaled.pixels) v = 3.5 * v - 40.0;
    const Image a = minmax_normalize(s);
    const Image b = minmax_normalize(scaled);
    for (std::size_t i = 0; i < a.pixels.size(); ++i)
      CHECK(b.pixels[i] == doctest::Approx(a.pixels[i]).epsilon(1e-12));
  }
}

TEST_CASE("detect_dark_slices") {
  SUBCASE("uniform means are never flagged") {
    const VoxelVolume vol = volume_with_slice_values(3, 3, {100, 100, 100, 100});
    CHECK(detect_dark_slices(vol, 3, 0.7).empty());
  }
  SUBCASE("one dark interior slice is flagged") {
    const VoxelVolume vol = volume_with_slice_values(3, 3, {100, 100, 10, 100, 100});
    const auto found = detect_dark_slices(vol, 3, 0.7);
    REQUIRE(found.size() == 1);
    CHECK(found[0] == 2);
  }
  SUBCASE("uniformly dark volumes have no anomaly") {
    const VoxelVolume vol = volume_with_slice_values(3, 3, {10, 10, 10});
    CHECK(detect_dark_slices(vol, 3, 0.7).empty());
  }
  SUBCASE("median neighbor statistic tolerates a second dark slice in a wide window") {
    const VoxelVolume vol = volume_with_slice_values(3, 3, {100, 100, 10, 100, 10, 100, 100});
    const auto found = detect_dark_slices(vol, 5, 0.7);
    CHECK(found == std::vector<int>{2, 4});
  }
  SUBCASE("detection soundness on a brightness-uniform volume") {
    for (double factor : {0.1, 0.3, 0.5, 0.65, 0.75, 0.9, 0.99}) {
      VoxelVolume vol = uniform_brightness_volume(6, 6, 9);
      vol.scale_slice(4, factor);
      const auto found = detect_dark_slices(vol, 3, 0.7);
      CAPTURE(factor);
      if (factor < 0.7) {
        REQUIRE(found.size() == 1);
        CHECK(found[0] == 4);
      } else {
        CHECK(found.empty());
      }
    }
  }
}

TEST_CASE("repair_slice") {
  SUBCASE("interior slice rescaled to the neighbor-mean average") {
    const VoxelVolume vol = volume_with_slice_values(4, 4, {100, 20, 100});
    const VoxelVolume out = repair_slice(vol, 1);
    CHECK(out.slice_mean(1) == doctest::Approx(100.0));
    CHECK(out.at(0, 0, 1) == doctest::Approx(100.0)); // pixels scaled by 5
  }
  SUBCASE("boundary slice uses its single neighbor") {
    const VoxelVolume vol = volume_with_slice_values(4, 4, {40, 80});
    const VoxelVolume out = repair_slice(vol, 0);
    CHECK(out.slice_mean(0) == doctest::Approx(80.0));
  }
  SUBCASE("already matching slice is unchanged") {
    const VoxelVolume vol = volume_with_slice_values(4, 4, {50, 50, 50});
    const VoxelVolume out = repair_slice(vol, 1);
    CHECK(out.voxels == vol.voxels);
  }
  SUBCASE("no valid neighbor raises") {
    const VoxelVolume vol = volume_with_slice_values(2, 2, {10.0});
    CHECK_THROWS_AS(repair_slice(vol, 0), PipelineError);
    const VoxelVolume three = volume_with_slice_values(2, 2, {10, 5, 10});
    CHECK_THROWS_AS(repair_slice(three, 1, {0, 2}), PipelineError);
  }
  SUBCASE("repair preserves relative contrast") {
    VoxelVolume vol = uniform_brightness_volume(5, 5, 3);
    vol.scale_slice(1, 0.25);
    const double ratio_before = vol.at(0, 0, 1) / vol.at(1, 0, 1);
    const VoxelVolume out = repair_slice(vol, 1);
    CHECK(out.at(0, 0, 1) / out.at(1, 0, 1) == doctest::Approx(ratio_before));
  }
  SUBCASE("mean lands within 1e-9 of the target on random volumes") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
      VoxelVolume vol(5, 4, 6);
      for (double& v : vol.voxels) v = rng.uniform(1.0, 500.0);
      const int idx = rng.uniform_int(0, 5);
      const VoxelVolume out = repair_slice(vol, idx);
      double target = 0.0;
      int neighbors = 0;
      for (int j : {idx - 1, idx + 1})
        if (j >= 0 && j < 6) {
          target += vol.slice_mean(j);
          ++neighbors;
        }
      target /= neighbors;
      CHECK(std::abs(out.slice_mean(idx) - target) < 1e-9);
    }
  }
}

TEST_CASE("resize_slice") {
  SUBCASE("identity when the side matches") {
    Rng rng(31);
    Image s(9, 9);
    for (double& v : s.pixels) v = rng.uniform(0.0, 1.0);
    CHECK(resize_slice(s, 9) == s);
  }
  SUBCASE("2x2 to 3x3 bilinear midpoint") {
    Image s(2, 2);
    s.pixels = {0, 1, 0, 1};
    const Image out = resize_slice(s, 3);
    CHECK(out.at(0, 1) == doctest::Approx(0.5));
    CHECK(out.at(1, 1) == doctest::Approx(0.5));
    CHECK(out.at(2, 1) == doctest::Approx(0.5));
  }
  SUBCASE("constant input stays constant at any side") {
    const Image s(5, 3, 0.42);
    for (int side : {1, 2, 7, 32}) {
      const Image out = resize_slice(s, side);
      for (double v : out.pixels) CHECK(v == doctest::Approx(0.42));
    }
  }
  SUBCASE("output stays within the input range") {
    Rng rng(32);
    Image s(6, 11);
    for (double& v : s.pixels) v = rng.uniform(-5.0, 5.0);
    const double lo = image_min(s), hi = image_max(s);
    const Image out = resize_slice(s, 17);
    for (double v : out.pixels) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
}

TEST_CASE("run_pipeline shape contract on a phantom") {
  PhantomSpec spec;
  spec.nx = spec.ny = 32;
  spec.nz = 40;
  spec.lesion_fraction = 0.2;
  spec.noise_level = 3.0;
  spec.seed = 5;
  PipelineConfig cfg; // defaults: 10 slices of 224x224
  const auto [stack, report] = run_pipeline(synth_phantom(spec), cfg);
  REQUIRE(stack.slices.size() == 10);
  for (const Image& s : stack.slices) {
    CHECK(s.rows == 224);
    CHECK(s.cols == 224);
    for (double v : s.pixels) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(report.repairs_applied == 0);
  CHECK(report.per_slice_mean_brightness.size() == 10);
  CHECK(stack.label == SeverityLabel::CT1);
  CHECK(stack.patient_id == "phantom-5");
}

TEST_CASE("run_pipeline repairs an injected dark slice") {
  PhantomSpec spec;
  spec.nx = spec.ny = 24;
  spec.nz = 40;
  spec.seed = 8;
  VoxelVolume vol = synth_phantom(spec);
  vol.scale_slice(12, 0.2); // interior, survives trim (keeps 10..29)

  PipelineConfig cfg;
  cfg.resize_to = 32;
  const auto [stack, report] = run_pipeline(vol, cfg);
  CHECK(report.repairs_applied >= 1);
  // post-repair brightness profile has no residual outlier
  const auto& means = report.per_slice_mean_brightness;
  const double lo = *std::min_element(means.begin(), means.end());
  const double hi = *std::max_element(means.begin(), means.end());
  CHECK(lo > 0.7 * hi);
  (void)stack;
}

TEST_CASE("run_pipeline is a fixed point on an already standardized volume") {
  VoxelVolume vol = uniform_brightness_volume(16, 16, 10);
  PipelineConfig cfg;
  cfg.trim_fraction = 0.0;
  cfg.resize_to = 16;
  const auto [stack, report] = run_pipeline(vol, cfg);
  CHECK(report.repairs_applied == 0);
  REQUIRE(stack.slices.size() == 10);
  // resample at n == nz is the identity, so each output slice is the
  // normalized input slice
  const Image expected = minmax_normalize(vol.slice(0));
  for (const Image& s : stack.slices) CHECK(s == expected);
}

TEST_CASE("normalizing before repair is not equivalent to the pipeline order") {
  PhantomSpec spec;
  spec.nx = spec.ny = 24;
  spec.nz = 40;
  spec.seed = 13;
  VoxelVolume vol = synth_phantom(spec);
  vol.scale_slice(14, 0.2);

  PipelineConfig cfg;
  cfg.resize_to = 24;
  const auto [stack, report] = run_pipeline(vol, cfg);
  CHECK(report.repairs_applied >= 1);

  // normalize-first variant: per-slice min-max erases the multiplicative
  // darkening entirely, so detection finds nothing afterwards
  const VoxelVolume work = resample_slices(trim_slices(vol, cfg.trim_fraction), cfg.target_slices);
  VoxelVolume norm(work.nx, work.ny, work.nz);
  for (int z = 0; z < work.nz; ++z) norm.set_slice(z, minmax_normalize(work.slice(z)));
  CHECK(detect_dark_slices(norm, cfg.window, cfg.darkness_ratio).empty());
}

TEST_CASE("degenerate slices are flagged in the report and zeroed") {
  VoxelVolume vol = uniform_brightness_volume(8, 8, 10);
  // make slice 0 constant: min-max range degenerates after resample identity
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) vol.at(x, y, 0) = 60.0;
  PipelineConfig cfg;
  cfg.trim_fraction = 0.0;
  cfg.resize_to = 8;
  const auto [stack, report] = run_pipeline(vol, cfg);
  REQUIRE(report.degenerate_slices.size() == 1);
  CHECK(report.degenerate_slices[0] == 0);
  for (double v : stack.slices[0].pixels) CHECK(v == 0.0);
}
