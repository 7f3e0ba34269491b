#pragma once

#include <cstdint>
#include <vector>

#include "ctqc/volume.hpp"

namespace ctqc {

/// On-disk datatype codes supported by the parser.
enum class NiftiDatatype : std::int16_t {
  UInt8 = 2,
  Int16 = 4,
  Float32 = 16,
};

/// Parses a single-file NIfTI-1 volume ("n+1\0" magic). Voxels are converted
/// to double and scl_slope/scl_inter applied when scl_slope != 0. Endianness
/// is inferred from the sizeof_hdr field. patient_id is left empty.
///
/// Throws ParseError with code BadMagic, UnsupportedDatatype, UnsupportedDims,
/// Truncated, or NonFinite.
VoxelVolume parse_nifti(const std::vector<std::uint8_t>& bytes);

/// Serializes a volume as a single-file NIfTI-1 with scl_slope=1, scl_inter=0.
/// Values are rounded to nearest and clamped to the datatype's range for the
/// integer codes; volumes whose values are representable round-trip exactly.
std::vector<std::uint8_t> serialize_nifti(const VoxelVolume& vol, NiftiDatatype datatype,
                                          bool big_endian = false);

VoxelVolume read_nifti_file(const std::string& path);
void write_nifti_file(const std::string& path, const VoxelVolume& vol, NiftiDatatype datatype,
                      bool big_endian = false);

} // namespace ctqc
