#include "ctqc/stack_io.hpp"

#include <cstring>
#include <fstream>

namespace ctqc {

namespace {

class ByteWriter {
public:
  explicit ByteWriter(const std::string& path) : os_(path, std::ios::binary) {
    if (!os_) throw Error("cannot write " + path);
  }

  void u32(std::uint32_t v) {
    std::uint8_t b[4] = {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
                         static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
    os_.write(reinterpret_cast<const char*>(b), 4);
  }

  void i32(std::int32_t v) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    u32(raw);
  }

  void f32(float v) {
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    u32(raw);
  }

  void f64(double v) {
    std::uint64_t raw;
    std::memcpy(&raw, &v, 8);
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(raw >> (8 * i));
    os_.write(reinterpret_cast<const char*>(b), 8);
  }

  void bytes(const void* data, std::size_t n) { os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n)); }

private:
  std::ofstream os_;
};

class ByteReader {
public:
  ByteReader(const std::string& path, const char* what) : what_(what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseError::Code::Truncated, std::string("cannot open ") + what + " file " + path);
    data_.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }

  std::int32_t i32() {
    const std::uint32_t raw = u32();
    std::int32_t v;
    std::memcpy(&v, &raw, 4);
    return v;
  }

  float f32() {
    const std::uint32_t raw = u32();
    float v;
    std::memcpy(&v, &raw, 4);
    return v;
  }

  double f64() {
    need(8);
    std::uint64_t raw = 0;
    for (int i = 7; i >= 0; --i) raw = (raw << 8) | data_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 8;
    double v;
    std::memcpy(&v, &raw, 8);
    return v;
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void expect_end() const {
    if (pos_ != data_.size())
      throw ParseError(ParseError::Code::Malformed, std::string(what_) + " file has trailing bytes");
  }

private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size())
      throw ParseError(ParseError::Code::Truncated, std::string(what_) + " file truncated");
  }

  std::vector<std::uint8_t> data_;
  std::size_t pos_ = 0;
  const char* what_;
};

} // namespace

void write_stack_file(const std::string& path, const SliceStack& stack) {
  ByteWriter w(path);
  w.u32(static_cast<std::uint32_t>(stack.patient_id.size()));
  w.bytes(stack.patient_id.data(), stack.patient_id.size());
  w.u32(static_cast<std::uint32_t>(stack.slices.size()));
  const int side = stack.slices.empty() ? 0 : stack.slices.front().rows;
  w.u32(static_cast<std::uint32_t>(side));
  w.i32(stack.label ? static_cast<std::int32_t>(*stack.label) : -1);
  for (const Image& img : stack.slices)
    for (double v : img.pixels) w.f32(static_cast<float>(v));
}

SliceStack read_stack_file(const std::string& path) {
  ByteReader r(path, "stack");
  SliceStack stack;
  const std::uint32_t id_len = r.u32();
  if (id_len > (1u << 20))
    throw ParseError(ParseError::Code::Malformed, "stack file patient id is implausibly long");
  stack.patient_id = r.str(id_len);
  const std::uint32_t count = r.u32();
  const std::uint32_t side = r.u32();
  const std::int32_t label_code = r.i32();
  if (label_code != -1) {
    if (label_code < 0 || label_code >= kNumClasses)
      throw ParseError(ParseError::Code::Malformed, "stack file label code out of range");
    stack.label = static_cast<SeverityLabel>(label_code);
  }
  stack.slices.reserve(count);
  for (std::uint32_t s = 0; s < count; ++s) {
    Image img(static_cast<int>(side), static_cast<int>(side));
    for (double& v : img.pixels) v = static_cast<double>(r.f32());
    stack.slices.push_back(std::move(img));
  }
  r.expect_end();
  return stack;
}

void write_model_file(const std::string& path, const LinearModel& model) {
  ByteWriter w(path);
  w.u32(static_cast<std::uint32_t>(model.k));
  w.u32(static_cast<std::uint32_t>(model.dim));
  for (double v : model.weights) w.f64(v);
}

LinearModel read_model_file(const std::string& path) {
  ByteReader r(path, "model");
  const std::uint32_t k = r.u32();
  const std::uint32_t dim = r.u32();
  if (k < 2 || k > 1024 || dim < 1 || dim > (1u << 24))
    throw ParseError(ParseError::Code::Malformed, "model file header out of range");
  LinearModel model(static_cast<int>(k), static_cast<int>(dim));
  for (double& v : model.weights) v = r.f64();
  r.expect_end();
  return model;
}

void write_generator_file(const std::string& path, const AffineGeneratorParams& params) {
  params.validate();
  ByteWriter w(path);
  w.u32(static_cast<std::uint32_t>(params.latent_dim));
  w.u32(static_cast<std::uint32_t>(params.rows));
  w.u32(static_cast<std::uint32_t>(params.cols));
  for (double v : params.a) w.f64(v);
  for (double v : params.b) w.f64(v);
}

AffineGeneratorParams read_generator_file(const std::string& path) {
  ByteReader r(path, "generator");
  AffineGeneratorParams params;
  params.latent_dim = static_cast<int>(r.u32());
  params.rows = static_cast<int>(r.u32());
  params.cols = static_cast<int>(r.u32());
  if (params.latent_dim < 1 || params.latent_dim > 4096 || params.rows < 1 || params.cols < 1 ||
      params.rows > 8192 || params.cols > 8192)
    throw ParseError(ParseError::Code::Malformed, "generator file header out of range");
  const std::size_t pixels = static_cast<std::size_t>(params.rows) * params.cols;
  params.a.resize(pixels * static_cast<std::size_t>(params.latent_dim));
  params.b.resize(pixels);
  for (double& v : params.a) v = r.f64();
  for (double& v : params.b) v = r.f64();
  r.expect_end();
  params.validate();
  return params;
}

} // namespace ctqc
