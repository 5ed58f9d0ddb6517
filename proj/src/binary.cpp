#include "curblabel/binary.hpp"

#include <fstream>

namespace curblabel::binary {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + path.string());
  const auto size = static_cast<std::size_t>(in.tellg());
  std::vector<unsigned char> bytes(size);
  in.seekg(0);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size))) {
    throw IoError("read failed: " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path.string());
}

void Writer::save(const std::filesystem::path& path) const { write_file(path, bytes_.data(), bytes_.size()); }

Reader Reader::open(const std::filesystem::path& path) { return Reader(read_file(path), path.string()); }

void Reader::expect_magic(const char (&magic)[5]) {
  require(4);
  for (int i = 0; i < 4; ++i) {
    if (bytes_[pos_ + i] != static_cast<unsigned char>(magic[i])) fail(std::string("bad magic, expected ") + magic);
  }
  pos_ += 4;
}

}  // namespace curblabel::binary
