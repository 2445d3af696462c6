#include "facegen/io/binary.hpp"

#include "facegen/error.hpp"

#include <bit>
#include <cstring>

namespace facegen::io {

static_assert(std::endian::native == std::endian::little, "container encoding assumes a little-endian host");

void ByteWriter::raw(const void* p, std::size_t n) { buffer_.append(static_cast<const char*>(p), n); }

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buffer_.append(s);
}

void ByteWriter::vec(const Eigen::VectorXd& v) {
  u64(static_cast<std::uint64_t>(v.size()));
  raw(v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

void ByteWriter::mat(const Eigen::MatrixXd& m) {
  u64(static_cast<std::uint64_t>(m.rows()));
  u64(static_cast<std::uint64_t>(m.cols()));
  raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

void ByteReader::raw(void* p, std::size_t n) {
  if (n > bytes_.size() - pos_) fail(ErrorCode::kFormat, "format error: truncated data");
  std::memcpy(p, bytes_.data() + pos_, n);
  pos_ += n;
}

std::uint8_t ByteReader::u8() {
  std::uint8_t v;
  raw(&v, sizeof v);
  return v;
}

std::uint32_t ByteReader::u32() {
  std::uint32_t v;
  raw(&v, sizeof v);
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v;
  raw(&v, sizeof v);
  return v;
}

std::int32_t ByteReader::i32() {
  std::int32_t v;
  raw(&v, sizeof v);
  return v;
}

double ByteReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}

std::string ByteReader::str() {
  const std::uint32_t n = u32();
  if (n > bytes_.size() - pos_) fail(ErrorCode::kFormat, "format error: truncated string");
  std::string s(bytes_.substr(pos_, n));
  pos_ += n;
  return s;
}

Eigen::VectorXd ByteReader::vec() {
  const std::uint64_t n = u64();
  if (n > (bytes_.size() - pos_) / sizeof(double)) fail(ErrorCode::kFormat, "format error: truncated vector");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  raw(v.data(), n * sizeof(double));
  return v;
}

Eigen::MatrixXd ByteReader::mat() {
  const std::uint64_t rows = u64();
  const std::uint64_t cols = u64();
  if (cols != 0 && rows > (bytes_.size() - pos_) / sizeof(double) / cols) {
    fail(ErrorCode::kFormat, "format error: truncated matrix");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  raw(m.data(), rows * cols * sizeof(double));
  return m;
}

}  // namespace facegen::io
