#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include "emtk/error.hpp"

namespace emtk::detail {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

inline void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

inline void put_f32(std::string& out, float v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

/// Bounds-checked cursor over a byte image.
class Reader {
 public:
  Reader(std::string_view bytes, std::string what) : bytes_(bytes), what_(std::move(what)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::string_view take(std::size_t n, const char* field) {
    if (remaining() < n) {
      throw FormatError(what_ + ": truncated while reading " + field, pos_);
    }
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint32_t u32(const char* field) {
    std::uint32_t v;
    std::memcpy(&v, take(4, field).data(), 4);
    return v;
  }

  float f32(const char* field) {
    float v;
    std::memcpy(&v, take(4, field).data(), 4);
    return v;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw FormatError(what_ + ": " + msg, at);
  }

 private:
  std::string_view bytes_;
  std::string what_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

}  // namespace emtk::detail
