#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curblabel/class_policy.hpp"
#include "curblabel/kitti_io.hpp"
#include "curblabel/types.hpp"

namespace curblabel {

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  T& at(int col, int row) { return data[static_cast<std::size_t>(row) * width + col]; }
  const T& at(int col, int row) const { return data[static_cast<std::size_t>(row) * width + col]; }
  bool contains(long long col, long long row) const { return col >= 0 && row >= 0 && col < width && row < height; }
  bool same_shape(const auto& other) const { return width == other.width && height == other.height; }
  friend bool operator==(const Image&, const Image&) = default;
};

using Mask = Image<std::uint8_t>;
using InstanceMask = Image<std::uint32_t>;
using FloatImage = Image<float>;

struct HeightSlice {
  double z_min;
  double z_max;  // exclusive
};

/// Sensor-frame BEV geometry. Columns run along +x from x_min, rows run from y_max (row 0)
/// down to y_min, so the image is a top view with +y up.
struct BevSpec {
  double resolution = 0.1;
  int width = 384;
  int height = 512;
  double x_min = -19.2;
  double x_max = 19.2;
  double y_min = -25.6;
  double y_max = 25.6;
  std::vector<HeightSlice> slices = default_slices();
  int dilation_kernel = 7;

  /// Six 0.5 m slices covering z in [-2.5, 0.5).
  static std::vector<HeightSlice> default_slices();
  void validate() const;

  /// Continuous pixel coordinates (col, row) before flooring; may lie outside the image.
  std::pair<double, double> pixel_coords(const Vec3& p) const;
  /// Integer pixel of a point, or nullopt outside the image.
  std::optional<std::pair<int, int>> pixel_of(const Vec3& p) const;
};

struct BevRaster {
  FloatImage density;
  std::vector<FloatImage> height_channels;
  Mask label_mask;
  InstanceMask instance_mask;
};

/// density = log(1 + n) / log(1 + n_max) per pixel column; height channel s is 1 where any
/// point with z in slice s lands. Masks are allocated empty.
BevRaster encode_frame(std::span<const PointXYZI> points, const BevSpec& spec);

/// Draws each curb polyline into a per-instance thin mask (Bresenham between consecutive
/// points), without dilation.
InstanceMask rasterize_instances(const FrameAnnotation& annotation, const BevSpec& spec);

/// Square dilation with a kernel of `kernel` pixels (odd).
Mask dilate(const Mask& mask, int kernel);

/// Rasterized and dilated labels. Instances are painted in ascending id order, so the
/// higher id owns pixels where dilated instances overlap.
std::pair<Mask, InstanceMask> project_labels(const FrameAnnotation& annotation, const BevSpec& spec);

/// Per-point flags: the point's pixel is positive and its class is road or curbside.
std::vector<std::uint8_t> curb_point_mask(std::span<const PointXYZI> points, std::span<const PointLabel> labels,
                                          const Mask& label_mask, const BevSpec& spec, const ClassPolicy& policy);

/// Per-point class list with eligible points under positive pixels switched to curb_class.
std::vector<ClassId> relabel_points(std::span<const PointXYZI> points, std::span<const PointLabel> labels,
                                    const Mask& label_mask, const BevSpec& spec, const ClassPolicy& policy,
                                    ClassId curb_class);

// Tensor dump (little-endian):
//   char[4] "BEVT" | u32 version (1) | u32 channels | u32 height | u32 width
//   channels x (u32 name_length, name bytes) | channels x height x width f32, row-major
void write_bev_tensor(const BevRaster& raster, const std::filesystem::path& path);
/// Lossless images: <stem>_density.pgm, <stem>_h<k>.pgm, <stem>_label.pgm,
/// <stem>_instance.pgm (16-bit ids) and <stem>_instance.ppm (palette).
void write_bev_images(const BevRaster& raster, const std::filesystem::path& dir, const std::string& stem);

}  // namespace curblabel
