#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "curblabel/error.hpp"

namespace curblabel::binary {

/// Little-endian append-only byte buffer.
class Writer {
 public:
  template <typename T>
  void put(T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
  }
  void put_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    bytes_.insert(bytes_.end(), p, p + n);
  }
  const std::vector<unsigned char>& bytes() const { return bytes_; }
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<unsigned char> bytes_;
};

/// Bounds-checked little-endian reader; every failure is a FormatError with the offset.
class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}
  static Reader open(const std::filesystem::path& path);

  template <typename T>
  T get() {
    require(sizeof(T));
    unsigned char raw[sizeof(T)];
    std::memcpy(raw, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    return value;
  }
  void expect_magic(const char (&magic)[5]);
  void require(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(path_, pos_, "unexpected end of file");
  }
  [[noreturn]] void fail(const std::string& what) const { throw FormatError(path_, pos_, what); }

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  bool at_end() const { return pos_ == bytes_.size(); }
  const std::string& path() const { return path_; }

 private:
  std::vector<unsigned char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const void* data, std::size_t size);

}  // namespace curblabel::binary
