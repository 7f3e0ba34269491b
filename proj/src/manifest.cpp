#include "ctqc/manifest.hpp"

#include <fstream>
#include <sstream>

namespace ctqc {

namespace {

std::string strip(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

} // namespace

DatasetManifest parse_manifest_text(const std::string& text) {
  DatasetManifest manifest;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string trimmed = strip(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const std::size_t comma = trimmed.rfind(',');
    if (comma == std::string::npos || comma == 0)
      throw ParseError(ParseError::Code::MalformedLine,
                       "manifest line " + std::to_string(line_no) + ": expected \"path,label\"");
    const std::string path = strip(trimmed.substr(0, comma));
    const std::string label_text = strip(trimmed.substr(comma + 1));
    const auto label = label_from_string(label_text);
    if (!label)
      throw ParseError(ParseError::Code::UnknownLabel,
                       "manifest line " + std::to_string(line_no) + ": unknown label \"" + label_text + "\"");
    manifest.entries.push_back({path, *label});
    ++manifest.class_counts[static_cast<int>(*label)];
  }
  return manifest;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(ParseError::Code::Truncated, "cannot open manifest " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_text(buf.str());
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
  std::ofstream os(path);
  if (!os)
    throw Error("cannot write manifest " + path);
  for (const auto& e : manifest.entries)
    os << e.path << "," << to_string(e.label) << "\n";
}

} // namespace ctqc
