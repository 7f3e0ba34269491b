#pragma once

#include <stdexcept>
#include <string>

namespace ctqc {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input decoding failures: NIfTI volumes, manifests, stack/model/generator files.
/// The CLI maps these to exit code 2.
class ParseError : public Error {
public:
  enum class Code {
    BadMagic,
    UnsupportedDatatype,
    UnsupportedDims,
    Truncated,
    NonFinite,
    MalformedLine,
    UnknownLabel,
    Malformed,
  };

  ParseError(Code code, const std::string& what) : Error(what), code(code) {}
  Code code;
};

/// Standardization pipeline failures. CLI exit code 3.
class PipelineError : public Error {
public:
  enum class Code { EmptyResult, NoValidNeighbor };

  PipelineError(Code code, const std::string& what) : Error(what), code(code) {}
  Code code;
};

/// Cross-validation split failures (a class has fewer samples than folds).
/// CLI exit code 4.
class SplitError : public Error {
public:
  explicit SplitError(const std::string& what) : Error(what) {}
};

/// Configuration inconsistencies: bad loss parameters, invalid JSON config
/// fields, unknown keys, empty grids. CLI exit code 5.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Contract violations on operation arguments (mismatched shapes, empty
/// batches, out-of-range class indices). At the CLI boundary these can only
/// arise from inconsistent input files, so they map to exit code 2.
class ArgumentError : public Error {
public:
  enum class Code {
    ShapeMismatch,
    LengthMismatch,
    DimensionMismatch,
    EmptyBatch,
    EmptyInput,
    EmptyDataset,
    ClassOutOfRange,
  };

  ArgumentError(Code code, const std::string& what) : Error(what), code(code) {}
  Code code;
};

} // namespace ctqc
