#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace curblabel {

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
  RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, Rgb{0, 0, 0}) {}
  void set(int x, int y, Rgb c) { pixels[static_cast<std::size_t>(y) * width + x] = c; }
  int width;
  int height;
  std::vector<Rgb> pixels;
};

/// Binary PPM (P6).
void write_ppm(const RgbImage& image, const std::filesystem::path& path);
/// Binary PGM (P5), 8-bit.
void write_pgm(int width, int height, const std::vector<std::uint8_t>& pixels, const std::filesystem::path& path);
/// Binary PGM (P5), 16-bit big-endian samples.
void write_pgm16(int width, int height, const std::vector<std::uint16_t>& pixels, const std::filesystem::path& path);

/// Distinct, stable color for an instance id (0 maps to black).
Rgb instance_color(std::uint32_t id);

}  // namespace curblabel
