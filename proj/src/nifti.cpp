#include "ctqc/nifti.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace ctqc {

namespace {

constexpr std::size_t kHeaderSize = 348;
constexpr std::size_t kMinFileSize = 352; // header + 4-byte extender
constexpr int kSizeofHdrOffset = 0;
constexpr int kDimOffset = 40;
constexpr int kDatatypeOffset = 70;
constexpr int kBitpixOffset = 72;
constexpr int kVoxOffsetOffset = 108;
constexpr int kSclSlopeOffset = 112;
constexpr int kSclInterOffset = 116;
constexpr int kMagicOffset = 344;

struct Reader {
  const std::uint8_t* data;
  bool swap;

  std::int16_t i16(std::size_t off) const {
    std::uint16_t raw;
    std::memcpy(&raw, data + off, 2);
    if (swap) raw = static_cast<std::uint16_t>((raw >> 8) | (raw << 8));
    std::int16_t out;
    std::memcpy(&out, &raw, 2);
    return out;
  }

  std::int32_t i32(std::size_t off) const {
    std::uint32_t raw;
    std::memcpy(&raw, data + off, 4);
    if (swap) raw = byteswap32(raw);
    std::int32_t out;
    std::memcpy(&out, &raw, 4);
    return out;
  }

  float f32(std::size_t off) const {
    std::uint32_t raw;
    std::memcpy(&raw, data + off, 4);
    if (swap) raw = byteswap32(raw);
    float out;
    std::memcpy(&out, &raw, 4);
    return out;
  }

  static std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0x000000ffu) << 24) | ((v & 0x0000ff00u) << 8) |
           ((v & 0x00ff0000u) >> 8) | ((v & 0xff000000u) >> 24);
  }
};

int bytes_per_voxel(NiftiDatatype dt) {
  switch (dt) {
    case NiftiDatatype::UInt8: return 1;
    case NiftiDatatype::Int16: return 2;
    case NiftiDatatype::Float32: return 4;
  }
  return 0;
}

} // namespace

VoxelVolume parse_nifti(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kMinFileSize)
    throw ParseError(ParseError::Code::Truncated,
                     "NIfTI file shorter than header: expected at least " +
                         std::to_string(kMinFileSize) + " bytes, got " + std::to_string(bytes.size()));

  Reader rd{bytes.data(), false};
  if (rd.i32(kSizeofHdrOffset) != 348) {
    rd.swap = true;
    if (rd.i32(kSizeofHdrOffset) != 348)
      throw ParseError(ParseError::Code::BadMagic, "sizeof_hdr is not 348 in either byte order");
  }

  if (std::memcmp(bytes.data() + kMagicOffset, "n+1\0", 4) != 0)
    throw ParseError(ParseError::Code::BadMagic, "magic is not the single-file form \"n+1\"");

  const std::int16_t ndim = rd.i16(kDimOffset);
  if (ndim < 1 || ndim > 7)
    throw ParseError(ParseError::Code::UnsupportedDims, "dim[0] out of range: " + std::to_string(ndim));
  std::int16_t dim[8] = {ndim, 1, 1, 1, 1, 1, 1, 1};
  for (int i = 1; i <= ndim; ++i) dim[i] = rd.i16(kDimOffset + 2 * i);
  for (int i = 4; i <= ndim; ++i)
    if (dim[i] > 1)
      throw ParseError(ParseError::Code::UnsupportedDims, "multi-frame volumes are not supported (dim[" +
                                                              std::to_string(i) + "]=" + std::to_string(dim[i]) + ")");
  const int nx = dim[1], ny = std::max<int>(dim[2], 1), nz = std::max<int>(dim[3], 1);
  if (nx < 1)
    throw ParseError(ParseError::Code::UnsupportedDims, "non-positive dim[1]");

  const std::int16_t dt_code = rd.i16(kDatatypeOffset);
  if (dt_code != 2 && dt_code != 4 && dt_code != 16)
    throw ParseError(ParseError::Code::UnsupportedDatatype, "unsupported datatype code " + std::to_string(dt_code));
  const NiftiDatatype dt = static_cast<NiftiDatatype>(dt_code);
  const int nbytes = bytes_per_voxel(dt);

  const std::int16_t bitpix = rd.i16(kBitpixOffset);
  if (bitpix != 8 * nbytes)
    throw ParseError(ParseError::Code::UnsupportedDatatype,
                     "bitpix " + std::to_string(bitpix) + " inconsistent with datatype code " + std::to_string(dt_code));

  const float vox_offset_f = rd.f32(kVoxOffsetOffset);
  if (!std::isfinite(vox_offset_f) || vox_offset_f < static_cast<float>(kHeaderSize))
    throw ParseError(ParseError::Code::BadMagic, "invalid vox_offset");
  const std::size_t vox_offset = static_cast<std::size_t>(vox_offset_f);

  const float scl_slope = rd.f32(kSclSlopeOffset);
  const float scl_inter = rd.f32(kSclInterOffset);

  const std::size_t nvox = static_cast<std::size_t>(nx) * ny * nz;
  const std::size_t needed = vox_offset + nvox * nbytes;
  if (bytes.size() < needed)
    throw ParseError(ParseError::Code::Truncated, "payload truncated: expected " + std::to_string(needed) +
                                                      " bytes, got " + std::to_string(bytes.size()));

  VoxelVolume vol(nx, ny, nz);
  const std::uint8_t* payload = bytes.data() + vox_offset;
  for (std::size_t i = 0; i < nvox; ++i) {
    double v = 0.0;
    switch (dt) {
      case NiftiDatatype::UInt8:
        v = static_cast<double>(payload[i]);
        break;
      case NiftiDatatype::Int16: {
        std::uint16_t raw;
        std::memcpy(&raw, payload + 2 * i, 2);
        if (rd.swap) raw = static_cast<std::uint16_t>((raw >> 8) | (raw << 8));
        std::int16_t s;
        std::memcpy(&s, &raw, 2);
        v = static_cast<double>(s);
        break;
      }
      case NiftiDatatype::Float32: {
        std::uint32_t raw;
        std::memcpy(&raw, payload + 4 * i, 4);
        if (rd.swap) raw = Reader::byteswap32(raw);
        float f;
        std::memcpy(&f, &raw, 4);
        v = static_cast<double>(f);
        break;
      }
    }
    if (scl_slope != 0.0f) v = v * scl_slope + scl_inter;
    if (!std::isfinite(v))
      throw ParseError(ParseError::Code::NonFinite, "non-finite voxel at index " + std::to_string(i));
    vol.voxels[i] = v;
  }
  return vol;
}

std::vector<std::uint8_t> serialize_nifti(const VoxelVolume& vol, NiftiDatatype datatype, bool big_endian) {
  const int nbytes = bytes_per_voxel(datatype);
  const std::size_t nvox = vol.voxel_count();
  std::vector<std::uint8_t> out(kMinFileSize + nvox * nbytes, 0);

  const auto put16 = [&](std::size_t off, std::int16_t v) {
    std::uint16_t raw;
    std::memcpy(&raw, &v, 2);
    if (big_endian) raw = static_cast<std::uint16_t>((raw >> 8) | (raw << 8));
    std::memcpy(out.data() + off, &raw, 2);
  };
  const auto put32 = [&](std::size_t off, std::uint32_t raw) {
    if (big_endian) raw = Reader::byteswap32(raw);
    std::memcpy(out.data() + off, &raw, 4);
  };
  const auto puti32 = [&](std::size_t off, std::int32_t v) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    put32(off, raw);
  };
  const auto putf32 = [&](std::size_t off, float v) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    put32(off, raw);
  };

  puti32(kSizeofHdrOffset, 348);
  put16(kDimOffset, 3);
  put16(kDimOffset + 2, static_cast<std::int16_t>(vol.nx));
  put16(kDimOffset + 4, static_cast<std::int16_t>(vol.ny));
  put16(kDimOffset + 6, static_cast<std::int16_t>(vol.nz));
  for (int i = 4; i <= 7; ++i) put16(kDimOffset + 2 * i, 1);
  put16(kDatatypeOffset, static_cast<std::int16_t>(datatype));
  put16(kBitpixOffset, static_cast<std::int16_t>(8 * nbytes));
  putf32(kVoxOffsetOffset, static_cast<float>(kMinFileSize));
  putf32(kSclSlopeOffset, 1.0f);
  putf32(kSclInterOffset, 0.0f);
  std::memcpy(out.data() + kMagicOffset, "n+1\0", 4);

  std::uint8_t* payload = out.data() + kMinFileSize;
  for (std::size_t i = 0; i < nvox; ++i) {
    const double v = vol.voxels[i];
    switch (datatype) {
      case NiftiDatatype::UInt8: {
        const double r = std::clamp(std::round(v), 0.0, 255.0);
        payload[i] = static_cast<std::uint8_t>(r);
        break;
      }
      case NiftiDatatype::Int16: {
        const double r = std::clamp(std::round(v), -32768.0, 32767.0);
        const std::int16_t s = static_cast<std::int16_t>(r);
        std::uint16_t raw;
        std::memcpy(&raw, &s, 2);
        if (big_endian) raw = static_cast<std::uint16_t>((raw >> 8) | (raw << 8));
        std::memcpy(payload + 2 * i, &raw, 2);
        break;
      }
      case NiftiDatatype::Float32: {
        const float f = static_cast<float>(v);
        std::uint32_t raw;
        std::memcpy(&raw, &f, 4);
        if (big_endian) raw = Reader::byteswap32(raw);
        std::memcpy(payload + 4 * i, &raw, 4);
        break;
      }
    }
  }
  return out;
}

VoxelVolume read_nifti_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError(ParseError::Code::Truncated, "cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_nifti(bytes);
}

void write_nifti_file(const std::string& path, const VoxelVolume& vol, NiftiDatatype datatype, bool big_endian) {
  const auto bytes = serialize_nifti(vol, datatype, big_endian);
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw Error("cannot write " + path);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace ctqc
