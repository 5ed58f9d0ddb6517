#include "curblabel/bev.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "curblabel/binary.hpp"
#include "curblabel/error.hpp"
#include "curblabel/image_io.hpp"

namespace curblabel {

namespace {

void draw_line(Mask& mask, long long c0, long long r0, long long c1, long long r1) {
  const long long dc = std::llabs(c1 - c0);
  const long long dr = -std::llabs(r1 - r0);
  const long long sc = c0 < c1 ? 1 : -1;
  const long long sr = r0 < r1 ? 1 : -1;
  long long err = dc + dr;
  while (true) {
    if (mask.contains(c0, r0)) mask.at(static_cast<int>(c0), static_cast<int>(r0)) = 1;
    if (c0 == c1 && r0 == r1) break;
    const long long e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      c0 += sc;
    }
    if (e2 <= dc) {
      err += dc;
      r0 += sr;
    }
  }
}

std::pair<long long, long long> floor_pixel(const BevSpec& spec, const Vec3& p) {
  const auto [c, r] = spec.pixel_coords(p);
  return {static_cast<long long>(std::floor(c)), static_cast<long long>(std::floor(r))};
}

}  // namespace

std::vector<HeightSlice> BevSpec::default_slices() {
  std::vector<HeightSlice> s;
  for (int k = 0; k < 6; ++k) s.push_back({-2.5 + 0.5 * k, -2.0 + 0.5 * k});
  return s;
}

void BevSpec::validate() const {
  if (!(resolution > 0.0)) throw InputError("BEV resolution must be positive");
  if (width <= 0 || height <= 0) throw InputError("BEV size must be positive");
  if (std::abs((x_max - x_min) / resolution - width) > 1e-6 || std::abs((y_max - y_min) / resolution - height) > 1e-6) {
    throw InputError("BEV ranges do not match width/height at the given resolution");
  }
  if (dilation_kernel < 1 || dilation_kernel % 2 == 0) throw InputError("dilation kernel must be odd and >= 1");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (!(slices[i].z_min < slices[i].z_max)) throw InputError("empty height slice");
    if (i > 0 && slices[i].z_min < slices[i - 1].z_max) throw InputError("height slices overlap or are unordered");
  }
}

std::pair<double, double> BevSpec::pixel_coords(const Vec3& p) const {
  const double col = (p.x() - x_min) / resolution;
  const double row = static_cast<double>(height) - (p.y() - y_min) / resolution;
  return {col, row};
}

std::optional<std::pair<int, int>> BevSpec::pixel_of(const Vec3& p) const {
  if (p.x() < x_min || p.x() >= x_max || p.y() < y_min || p.y() >= y_max) return std::nullopt;
  const int col = std::clamp(static_cast<int>(std::floor((p.x() - x_min) / resolution)), 0, width - 1);
  const int row = height - 1 - std::clamp(static_cast<int>(std::floor((p.y() - y_min) / resolution)), 0, height - 1);
  return std::make_pair(col, row);
}

BevRaster encode_frame(std::span<const PointXYZI> points, const BevSpec& spec) {
  spec.validate();
  BevRaster r;
  r.density = FloatImage(spec.width, spec.height, 0.0f);
  r.height_channels.assign(spec.slices.size(), FloatImage(spec.width, spec.height, 0.0f));
  r.label_mask = Mask(spec.width, spec.height, 0);
  r.instance_mask = InstanceMask(spec.width, spec.height, 0);

  Image<std::uint32_t> counts(spec.width, spec.height, 0);
  for (const auto& p : points) {
    const auto px = spec.pixel_of(p.xyz);
    if (!px) continue;
    ++counts.at(px->first, px->second);
    for (std::size_t s = 0; s < spec.slices.size(); ++s) {
      if (p.xyz.z() >= spec.slices[s].z_min && p.xyz.z() < spec.slices[s].z_max) {
        r.height_channels[s].at(px->first, px->second) = 1.0f;
      }
    }
  }
  const std::uint32_t n_max = *std::max_element(counts.data.begin(), counts.data.end());
  if (n_max > 0) {
    const double norm = std::log1p(static_cast<double>(n_max));
    for (std::size_t i = 0; i < counts.data.size(); ++i) {
      r.density.data[i] = static_cast<float>(std::log1p(static_cast<double>(counts.data[i])) / norm);
    }
  }
  return r;
}

InstanceMask rasterize_instances(const FrameAnnotation& annotation, const BevSpec& spec) {
  InstanceMask out(spec.width, spec.height, 0);
  std::map<InstanceId, Mask> per_instance;
  for (const auto& curb : annotation.curbs) {
    auto [it, inserted] = per_instance.try_emplace(curb.instance_id, Mask(spec.width, spec.height, 0));
    Mask& thin = it->second;
    for (std::size_t i = 0; i < curb.points.size(); ++i) {
      const auto [c1, r1] = floor_pixel(spec, curb.points[i]);
      const auto [c0, r0] = i == 0 ? std::make_pair(c1, r1) : floor_pixel(spec, curb.points[i - 1]);
      draw_line(thin, c0, r0, c1, r1);
    }
  }
  for (const auto& [id, thin] : per_instance) {
    for (std::size_t i = 0; i < thin.data.size(); ++i) {
      if (thin.data[i]) out.data[i] = id;
    }
  }
  return out;
}

Mask dilate(const Mask& mask, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) throw InputError("dilation kernel must be odd and >= 1");
  const int h = kernel / 2;
  // Separable: rows then columns.
  Mask rows(mask.width, mask.height, 0);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(c, r)) continue;
      for (int k = std::max(0, c - h); k <= std::min(mask.width - 1, c + h); ++k) rows.at(k, r) = 1;
    }
  }
  Mask out(mask.width, mask.height, 0);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!rows.at(c, r)) continue;
      for (int k = std::max(0, r - h); k <= std::min(mask.height - 1, r + h); ++k) out.at(c, k) = 1;
    }
  }
  return out;
}

std::pair<Mask, InstanceMask> project_labels(const FrameAnnotation& annotation, const BevSpec& spec) {
  spec.validate();
  std::map<InstanceId, Mask> per_instance;
  for (const auto& curb : annotation.curbs) {
    auto [it, inserted] = per_instance.try_emplace(curb.instance_id, Mask(spec.width, spec.height, 0));
    for (std::size_t i = 0; i < curb.points.size(); ++i) {
      const auto [c1, r1] = floor_pixel(spec, curb.points[i]);
      const auto [c0, r0] = i == 0 ? std::make_pair(c1, r1) : floor_pixel(spec, curb.points[i - 1]);
      draw_line(it->second, c0, r0, c1, r1);
    }
  }
  InstanceMask instances(spec.width, spec.height, 0);
  for (const auto& [id, thin] : per_instance) {
    const Mask wide = dilate(thin, spec.dilation_kernel);
    for (std::size_t i = 0; i < wide.data.size(); ++i) {
      if (wide.data[i]) instances.data[i] = id;
    }
  }
  Mask labels(spec.width, spec.height, 0);
  for (std::size_t i = 0; i < labels.data.size(); ++i) labels.data[i] = instances.data[i] != 0;
  return {std::move(labels), std::move(instances)};
}

std::vector<std::uint8_t> curb_point_mask(std::span<const PointXYZI> points, std::span<const PointLabel> labels,
                                          const Mask& label_mask, const BevSpec& spec, const ClassPolicy& policy) {
  if (points.size() != labels.size()) throw ConsistencyError("points and labels differ in length");
  if (label_mask.width != spec.width || label_mask.height != spec.height) {
    throw ConsistencyError("label mask does not match the BEV geometry");
  }
  std::vector<std::uint8_t> flags(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ClassId c = labels[i].class_id;
    if (!policy.is_road(c) && !policy.is_curbside(c)) continue;
    const auto px = spec.pixel_of(points[i].xyz);
    if (px && label_mask.at(px->first, px->second)) flags[i] = 1;
  }
  return flags;
}

std::vector<ClassId> relabel_points(std::span<const PointXYZI> points, std::span<const PointLabel> labels,
                                    const Mask& label_mask, const BevSpec& spec, const ClassPolicy& policy,
                                    ClassId curb_class) {
  const auto flags = curb_point_mask(points, labels, label_mask, spec, policy);
  std::vector<ClassId> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = flags[i] ? curb_class : labels[i].class_id;
  return out;
}

void write_bev_tensor(const BevRaster& raster, const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::vector<float>>> channels;
  channels.emplace_back("density", raster.density.data);
  for (std::size_t s = 0; s < raster.height_channels.size(); ++s) {
    channels.emplace_back("height_" + std::to_string(s), raster.height_channels[s].data);
  }
  std::vector<float> label(raster.label_mask.data.begin(), raster.label_mask.data.end());
  std::vector<float> instance(raster.instance_mask.data.begin(), raster.instance_mask.data.end());
  channels.emplace_back("label", std::move(label));
  channels.emplace_back("instance", std::move(instance));

  binary::Writer w;
  w.put_bytes("BEVT", 4);
  w.put(std::uint32_t{1});
  w.put(static_cast<std::uint32_t>(channels.size()));
  w.put(static_cast<std::uint32_t>(raster.density.height));
  w.put(static_cast<std::uint32_t>(raster.density.width));
  for (const auto& [name, data] : channels) {
    w.put(static_cast<std::uint32_t>(name.size()));
    w.put_bytes(name.data(), name.size());
  }
  for (const auto& [name, data] : channels) {
    for (float v : data) w.put(v);
  }
  w.save(path);
}

void write_bev_images(const BevRaster& raster, const std::filesystem::path& dir, const std::string& stem) {
  const int w = raster.density.width;
  const int h = raster.density.height;
  auto to_u8 = [](const FloatImage& img) {
    std::vector<std::uint8_t> px(img.data.size());
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(std::lround(255.0f * img.data[i]));
    return px;
  };
  write_pgm(w, h, to_u8(raster.density), dir / (stem + "_density.pgm"));
  for (std::size_t s = 0; s < raster.height_channels.size(); ++s) {
    write_pgm(w, h, to_u8(raster.height_channels[s]), dir / (stem + "_h" + std::to_string(s) + ".pgm"));
  }
  std::vector<std::uint8_t> label(raster.label_mask.data.size());
  for (std::size_t i = 0; i < label.size(); ++i) label[i] = raster.label_mask.data[i] ? 255 : 0;
  write_pgm(w, h, label, dir / (stem + "_label.pgm"));

  std::vector<std::uint16_t> ids(raster.instance_mask.data.size());
  RgbImage colored(w, h);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ids[i] = static_cast<std::uint16_t>(std::min<std::uint32_t>(raster.instance_mask.data[i], 65535));
    colored.pixels[i] = instance_color(raster.instance_mask.data[i]);
  }
  write_pgm16(w, h, ids, dir / (stem + "_instance.pgm"));
  write_ppm(colored, dir / (stem + "_instance.ppm"));
}

}  // namespace curblabel
