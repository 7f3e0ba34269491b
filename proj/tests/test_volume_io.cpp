#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "ctqc/manifest.hpp"
#include "ctqc/nifti.hpp"
#include "ctqc/phantom.hpp"

using namespace ctqc;

namespace {

// Hand-assembled NIfTI-1 file, independent of serialize_nifti.
struct RawNifti {
  std::vector<std::uint8_t> bytes;

  RawNifti() : bytes(352, 0) {
    poke_i32(0, 348);
    poke_i16(40, 3); // ndim
    poke_i16(42, 1);
    poke_i16(44, 1);
    poke_i16(46, 1);
    poke_f32(108, 352.0f); // vox_offset
    std::memcpy(bytes.data() + 344, "n+1\0", 4);
  }

  void poke_i16(std::size_t off, std::int16_t v) { std::memcpy(bytes.data() + off, &v, 2); }
  void poke_i32(std::size_t off, std::int32_t v) { std::memcpy(bytes.data() + off, &v, 4); }
  void poke_f32(std::size_t off, float v) { std::memcpy(bytes.data() + off, &v, 4); }

  void set_dims(std::int16_t nx, std::int16_t ny, std::int16_t nz) {
    poke_i16(42, nx);
    poke_i16(44, ny);
    poke_i16(46, nz);
  }

  void set_datatype(std::int16_t code, std::int16_t bitpix) {
    poke_i16(70, code);
    poke_i16(72, bitpix);
  }

  void append_f32(float v) {
    std::uint8_t raw[4];
    std::memcpy(raw, &v, 4);
    bytes.insert(bytes.end(), raw, raw + 4);
  }

  void append_i16(std::int16_t v) {
    std::uint8_t raw[2];
    std::memcpy(raw, &v, 2);
    bytes.insert(bytes.end(), raw, raw + 2);
  }
};

} // namespace

TEST_CASE("parse_nifti decodes a minimal little-endian float32 file") {
  RawNifti file;
  file.set_dims(2, 2, 1);
  file.set_datatype(16, 32);
  for (float v : {0.0f, 1.0f, 2.0f, 3.0f}) file.append_f32(v);

  const VoxelVolume vol = parse_nifti(file.bytes);
  CHECK(vol.nx == 2);
  CHECK(vol.ny == 2);
  CHECK(vol.nz == 1);
  REQUIRE(vol.voxel_count() == 4);
  // x-fastest order
  CHECK(vol.at(0, 0, 0) == 0.0);
  CHECK(vol.at(1, 0, 0) == 1.0);
  CHECK(vol.at(0, 1, 0) == 2.0);
  CHECK(vol.at(1, 1, 0) == 3.0);
}

TEST_CASE("parse_nifti rejects a zeroed magic") {
  RawNifti file;
  file.set_dims(1, 1, 1);
  file.set_datatype(16, 32);
  file.append_f32(0.0f);
  std::memset(file.bytes.data() + 344, 0, 4);
  try {
    parse_nifti(file.bytes);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseError::Code::BadMagic);
  }
}

TEST_CASE("parse_nifti applies scl_slope and scl_inter to int16 data") {
  RawNifti file;
  file.set_dims(1, 1, 1);
  file.set_datatype(4, 16);
  file.poke_f32(112, 2.0f); // scl_slope
  file.poke_f32(116, 1.0f); // scl_inter
  file.append_i16(5);
  const VoxelVolume vol = parse_nifti(file.bytes);
  CHECK(vol.at(0, 0, 0) == doctest::Approx(11.0));
}

TEST_CASE("parse_nifti error paths") {
  SUBCASE("short buffer") {
    std::vector<std::uint8_t> tiny(100, 0);
    try {
      parse_nifti(tiny);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::Truncated);
    }
  }
  SUBCASE("garbled sizeof_hdr") {
    RawNifti file;
    file.poke_i32(0, 999);
    try {
      parse_nifti(file.bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::BadMagic);
    }
  }
  SUBCASE("unsupported datatype code") {
    RawNifti file;
    file.set_dims(1, 1, 1);
    file.set_datatype(8, 32); // int32: not supported
    file.append_f32(0.0f);
    try {
      parse_nifti(file.bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::UnsupportedDatatype);
    }
  }
  SUBCASE("truncated payload carries expected and actual sizes") {
    RawNifti file;
    file.set_dims(4, 4, 2);
    file.set_datatype(16, 32);
    file.append_f32(1.0f); // 1 of 32 voxels
    try {
      parse_nifti(file.bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::Truncated);
      CHECK(std::string(e.what()).find("480") != std::string::npos); // 352 + 32*4
      CHECK(std::string(e.what()).find("356") != std::string::npos);
    }
  }
  SUBCASE("NaN payload is rejected") {
    RawNifti file;
    file.set_dims(1, 1, 1);
    file.set_datatype(16, 32);
    file.append_f32(std::numeric_limits<float>::quiet_NaN());
    try {
      parse_nifti(file.bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::NonFinite);
    }
  }
  SUBCASE("4D volumes are rejected") {
    RawNifti file;
    file.poke_i16(40, 4);
    file.set_dims(1, 1, 1);
    file.poke_i16(48, 2); // dim[4]
    file.set_datatype(16, 32);
    file.append_f32(0.0f);
    file.append_f32(0.0f);
    try {
      parse_nifti(file.bytes);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.code == ParseError::Code::UnsupportedDims);
    }
  }
}

TEST_CASE("round-trip through serialize_nifti is exact for every datatype and endianness") {
  VoxelVolume vol(3, 2, 2);
  const double values[] = {0, 1, 5, 7, 100, 255, 31, 17, 2, 90, 254, 13};
  std::copy(std::begin(values), std::end(values), vol.voxels.begin());

  for (NiftiDatatype dt : {NiftiDatatype::UInt8, NiftiDatatype::Int16, NiftiDatatype::Float32}) {
    for (bool big_endian : {false, true}) {
      CAPTURE(static_cast<int>(dt));
      CAPTURE(big_endian);
      const auto bytes = serialize_nifti(vol, dt, big_endian);
      const VoxelVolume parsed = parse_nifti(bytes);
      REQUIRE(parsed.voxel_count() == vol.voxel_count());
      CHECK(parsed.voxels == vol.voxels);
      // And a second generation stays identical.
      const VoxelVolume again = parse_nifti(serialize_nifti(parsed, dt, !big_endian));
      CHECK(again.voxels == vol.voxels);
    }
  }
}

TEST_CASE("big- and little-endian encodings of the same volume parse identically") {
  VoxelVolume vol(4, 3, 2);
  for (std::size_t i = 0; i < vol.voxel_count(); ++i) vol.voxels[i] = static_cast<double>(i) * 1.5 - 7.0;
  const VoxelVolume le = parse_nifti(serialize_nifti(vol, NiftiDatatype::Float32, false));
  const VoxelVolume be = parse_nifti(serialize_nifti(vol, NiftiDatatype::Float32, true));
  CHECK(le.voxels == be.voxels);
}

TEST_CASE("load_manifest tallies classes and preserves order") {
  const DatasetManifest m = parse_manifest_text("a.nii,CT0\nb.nii,CT0\n# comment\n\nc.nii,CT3\n");
  REQUIRE(m.entries.size() == 3);
  CHECK(m.entries[0].path == "a.nii");
  CHECK(m.entries[2].label == SeverityLabel::CT3);
  CHECK(m.class_counts[0] == 2);
  CHECK(m.class_counts[1] == 0);
  CHECK(m.class_counts[2] == 0);
  CHECK(m.class_counts[3] == 1);
}

TEST_CASE("load_manifest of an empty file is an empty manifest") {
  const DatasetManifest m = parse_manifest_text("");
  CHECK(m.entries.empty());
  for (int c : m.class_counts) CHECK(c == 0);
}

TEST_CASE("load_manifest error paths") {
  try {
    parse_manifest_text("foo.nii,CT9\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseError::Code::UnknownLabel);
  }
  try {
    parse_manifest_text("a.nii,CT0\nno-comma-here\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.code == ParseError::Code::MalformedLine);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("phantom with zero lesions is CT0 and has a uniform lung region") {
  PhantomSpec spec;
  spec.nx = spec.ny = 16;
  spec.nz = 12;
  spec.lesion_fraction = 0.0;
  spec.noise_level = 0.0;
  spec.seed = 7;
  const VoxelVolume vol = synth_phantom(spec);
  CHECK(vol.label == SeverityLabel::CT0);

  const auto [x0, x1] = lung_axis_range(spec.nx);
  const auto [y0, y1] = lung_axis_range(spec.ny);
  const auto [z0, z1] = lung_axis_range(spec.nz);
  for (int z = z0; z < z1; ++z)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) CHECK(vol.at(x, y, z) == phantom_levels::kLung);
}

TEST_CASE("phantom severity banding") {
  PhantomSpec spec;
  spec.lesion_fraction = 0.4;
  CHECK(synth_phantom(spec).label == SeverityLabel::CT2);
  spec.lesion_fraction = 0.25;
  CHECK(synth_phantom(spec).label == SeverityLabel::CT1);
  spec.lesion_fraction = 0.75;
  CHECK(synth_phantom(spec).label == SeverityLabel::CT3);
}

TEST_CASE("phantom is deterministic given its spec") {
  PhantomSpec spec;
  spec.nx = 20;
  spec.ny = 18;
  spec.nz = 14;
  spec.lesion_fraction = 0.3;
  spec.noise_level = 4.0;
  spec.seed = 99;
  const VoxelVolume a = synth_phantom(spec);
  const VoxelVolume b = synth_phantom(spec);
  CHECK(a.voxels == b.voxels);
  CHECK(a.patient_id == b.patient_id);
  CHECK(a.label == b.label);
}

TEST_CASE("phantom lesion count is exactly floor(fraction * region size)") {
  PhantomSpec spec;
  spec.nx = spec.ny = 12;
  spec.nz = 8;
  spec.lesion_fraction = 0.37;
  spec.noise_level = 0.0;
  spec.seed = 3;
  const VoxelVolume vol = synth_phantom(spec);

  const auto [x0, x1] = lung_axis_range(spec.nx);
  const auto [y0, y1] = lung_axis_range(spec.ny);
  const auto [z0, z1] = lung_axis_range(spec.nz);
  const std::size_t region = static_cast<std::size_t>(x1 - x0) * (y1 - y0) * (z1 - z0);
  std::size_t lesions = 0;
  for (int z = z0; z < z1; ++z)
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x)
        if (vol.at(x, y, z) == phantom_levels::kLesion) ++lesions;
  CHECK(lesions == static_cast<std::size_t>(0.37 * static_cast<double>(region)));
}

TEST_CASE("phantom label is monotone in lesion_fraction") {
  PhantomSpec spec;
  spec.seed = 1;
  int previous = 0;
  for (double f = 0.0; f < 0.95; f += 0.05) {
    spec.lesion_fraction = f;
    const int label = static_cast<int>(*synth_phantom(spec).label);
    CHECK(label >= previous);
    previous = label;
  }
}
