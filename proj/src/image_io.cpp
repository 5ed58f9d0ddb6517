#include "curblabel/image_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "curblabel/error.hpp"

namespace curblabel {

namespace {

std::ofstream open_image(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << header;
  return out;
}

}  // namespace

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
  auto out = open_image(path, "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n");
  for (const auto& px : image.pixels) out.write(reinterpret_cast<const char*>(px.data()), 3);
}

void write_pgm(int width, int height, const std::vector<std::uint8_t>& pixels, const std::filesystem::path& path) {
  auto out = open_image(path, "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n");
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_pgm16(int width, int height, const std::vector<std::uint16_t>& pixels, const std::filesystem::path& path) {
  auto out = open_image(path, "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n65535\n");
  for (std::uint16_t v : pixels) {
    const char be[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xFF)};
    out.write(be, 2);
  }
}

Rgb instance_color(std::uint32_t id) {
  if (id == 0) return {0, 0, 0};
  // golden-ratio hue walk
  const double hue = std::fmod(static_cast<double>(id) * 0.618033988749895, 1.0) * 6.0;
  const int sector = static_cast<int>(hue);
  const double f = hue - sector;
  const auto up = static_cast<std::uint8_t>(55 + 200 * f);
  const auto down = static_cast<std::uint8_t>(255 - 200 * f);
  switch (sector) {
    case 0: return {255, up, 55};
    case 1: return {down, 255, 55};
    case 2: return {55, 255, up};
    case 3: return {55, down, 255};
    case 4: return {up, 55, 255};
    default: return {255, 55, down};
  }
}

}  // namespace curblabel
