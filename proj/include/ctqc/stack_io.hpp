#pragma once

#include <string>

#include "ctqc/gan.hpp"
#include "ctqc/harness.hpp"
#include "ctqc/pipeline.hpp"

namespace ctqc {

/// Slice stack file: u32 id length, id bytes, u32 slice count, u32 side,
/// i32 label code (-1 when absent), then count*side*side float32 pixels,
/// row-major per slice. All integers and floats little-endian.
void write_stack_file(const std::string& path, const SliceStack& stack);
SliceStack read_stack_file(const std::string& path);

/// Model file: u32 K, u32 D+1, then row-major float64 weights.
void write_model_file(const std::string& path, const LinearModel& model);
LinearModel read_model_file(const std::string& path);

/// Affine generator file: u32 latent dim, u32 rows, u32 cols, then A
/// ((rows*cols) x latent, row-major) and b (rows*cols) as float64.
void write_generator_file(const std::string& path, const AffineGeneratorParams& params);
AffineGeneratorParams read_generator_file(const std::string& path);

} // namespace ctqc
