#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>

namespace facegen::io {

// Little-endian primitive encoding used by the model container.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i32(std::int32_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(std::string_view s);
  void vec(const Eigen::VectorXd& v);
  void mat(const Eigen::MatrixXd& m);

  const std::string& bytes() const { return buffer_; }
  std::string take() { return std::move(buffer_); }

 private:
  void raw(const void* p, std::size_t n);
  std::string buffer_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32();
  double f64();
  std::string str();
  Eigen::VectorXd vec();
  Eigen::MatrixXd mat();

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void raw(void* p, std::size_t n);
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace facegen::io
