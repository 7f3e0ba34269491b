#pragma once

#include <string>

#include "ctqc/volume.hpp"

namespace ctqc {

/// Loads a plain-text manifest: one "relative/path.nii,LABEL" per line,
/// '#' comment lines and blank lines ignored, order preserved.
/// Throws ParseError with code MalformedLine or UnknownLabel.
DatasetManifest load_manifest(const std::string& path);

DatasetManifest parse_manifest_text(const std::string& text);

void write_manifest(const std::string& path, const DatasetManifest& manifest);

} // namespace ctqc
