#include "curblabel/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "curblabel/error.hpp"

namespace curblabel {

using nlohmann::json;

namespace {

constexpr double kDeg = M_PI / 180.0;

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw InputError("config section '" + where + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw InputError("unknown config key '" + where + (where.empty() ? "" : ".") + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

void read_deg(const json& j, const char* key, double& radians) {
  if (!j.contains(key)) return;
  double deg = 0.0;
  read(j, key, deg);
  radians = deg * kDeg;
}

std::string mode_name(CandidateMode m) { return m == CandidateMode::AllPoints ? "all-points" : "cell-centroid"; }
std::string neighborhood_name(Neighborhood n) { return n == Neighborhood::Chebyshev ? "chebyshev" : "euclidean"; }

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void PipelineConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be positive");
  };
  positive(voxel_size, "voxel_size");
  positive(tile_size, "tile_size");
  positive(cell_size, "cell_size");
  positive(resample_interval, "resample_interval");
  if (!(height_threshold >= 0.0)) throw InputError("height_threshold must be non-negative");
  grow.validate();
  link.validate();
  fine.validate();
  bev.validate();
  if (eval_tolerance < 0) throw InputError("eval tolerance must be non-negative");
  if (iou_thresholds.empty()) throw InputError("at least one IoU threshold is required");
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw InputError("IoU thresholds must lie in (0, 1]");
  }
  if (frame_end && *frame_end < frame_begin) throw InputError("frame_end precedes frame_begin");
  if (curb_class == 0) throw InputError("curb_class must be nonzero");
}

std::size_t PipelineConfig::effective_workers() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

json PipelineConfig::parameters_json() const {
  json slices = json::array();
  for (const auto& s : bev.slices) slices.push_back({s.z_min, s.z_max});
  return {
      {"map", {{"voxel_size", voxel_size}, {"tile_size", tile_size}}},
      {"candidates",
       {{"cell_size", cell_size}, {"height_threshold", height_threshold}, {"mode", mode_name(candidate_mode)}}},
      {"grow",
       {{"r1", grow.r1},
        {"alpha1_deg", grow.alpha1 / kDeg},
        {"range2_factor", grow.range2_factor},
        {"alpha2_deg", grow.alpha2 / kDeg},
        {"psi", grow.psi},
        {"reaim_fraction", grow.reaim_fraction}}},
      {"link",
       {{"d_link", link.d_link},
        {"theta_link_deg", link.theta_link / kDeg},
        {"tail_window", link.tail_window},
        {"tail_min_span", link.tail_min_span},
        {"resample_interval", resample_interval}}},
      {"label",
       {{"r2", fine.r2},
        {"r3", fine.r3},
        {"r4", fine.r4},
        {"kappa", fine.kappa},
        {"phi", fine.phi},
        {"resample_interval", fine.resample_interval},
        {"curb_class", curb_class}}},
      {"bev",
       {{"resolution", bev.resolution},
        {"width", bev.width},
        {"height", bev.height},
        {"x_range", {bev.x_min, bev.x_max}},
        {"y_range", {bev.y_min, bev.y_max}},
        {"height_slices", slices},
        {"dilation_kernel", bev.dilation_kernel}}},
      {"eval",
       {{"tolerance", eval_tolerance},
        {"iou_thresholds", iou_thresholds},
        {"neighborhood", neighborhood_name(eval_neighborhood)}}},
      {"run",
       {{"seed", seed},
        {"frame_begin", frame_begin},
        {"frame_end", frame_end ? json(*frame_end) : json(nullptr)},
        {"write_pointwise_labels", write_pointwise_labels},
        {"write_bev", write_bev}}},
  };
}

json PipelineConfig::to_json() const {
  json j = parameters_json();
  j["paths"] = {{"sequence_dir", sequence_dir.string()},
                {"output_dir", output_dir.string()},
                {"sequence_id", sequence_id}};
  j["run"]["workers"] = workers;
  return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
  PipelineConfig c;
  reject_unknown(j, "", {"paths", "map", "candidates", "grow", "link", "label", "bev", "eval", "run"});
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    reject_unknown(p, "paths", {"sequence_dir", "output_dir", "sequence_id"});
    std::string s;
    if (p.contains("sequence_dir")) {
      read(p, "sequence_dir", s);
      c.sequence_dir = s;
    }
    if (p.contains("output_dir")) {
      read(p, "output_dir", s);
      c.output_dir = s;
    }
    read(p, "sequence_id", c.sequence_id);
  }
  if (j.contains("map")) {
    const auto& m = j["map"];
    reject_unknown(m, "map", {"voxel_size", "tile_size"});
    read(m, "voxel_size", c.voxel_size);
    read(m, "tile_size", c.tile_size);
  }
  if (j.contains("candidates")) {
    const auto& m = j["candidates"];
    reject_unknown(m, "candidates", {"cell_size", "height_threshold", "mode"});
    read(m, "cell_size", c.cell_size);
    read(m, "height_threshold", c.height_threshold);
    if (m.contains("mode")) {
      std::string mode;
      read(m, "mode", mode);
      if (mode == "all-points") {
        c.candidate_mode = CandidateMode::AllPoints;
      } else if (mode == "cell-centroid") {
        c.candidate_mode = CandidateMode::CellCentroid;
      } else {
        throw InputError("candidates.mode must be all-points or cell-centroid");
      }
    }
  }
  if (j.contains("grow")) {
    const auto& m = j["grow"];
    reject_unknown(m, "grow", {"r1", "alpha1_deg", "range2_factor", "alpha2_deg", "psi", "reaim_fraction"});
    read(m, "r1", c.grow.r1);
    read_deg(m, "alpha1_deg", c.grow.alpha1);
    read(m, "range2_factor", c.grow.range2_factor);
    read_deg(m, "alpha2_deg", c.grow.alpha2);
    read(m, "psi", c.grow.psi);
    read(m, "reaim_fraction", c.grow.reaim_fraction);
  }
  if (j.contains("link")) {
    const auto& m = j["link"];
    reject_unknown(m, "link", {"d_link", "theta_link_deg", "tail_window", "tail_min_span", "resample_interval"});
    read(m, "d_link", c.link.d_link);
    read_deg(m, "theta_link_deg", c.link.theta_link);
    read(m, "tail_window", c.link.tail_window);
    read(m, "tail_min_span", c.link.tail_min_span);
    read(m, "resample_interval", c.resample_interval);
  }
  if (j.contains("label")) {
    const auto& m = j["label"];
    reject_unknown(m, "label", {"r2", "r3", "r4", "kappa", "phi", "resample_interval", "curb_class"});
    read(m, "r2", c.fine.r2);
    read(m, "r3", c.fine.r3);
    read(m, "r4", c.fine.r4);
    read(m, "kappa", c.fine.kappa);
    read(m, "phi", c.fine.phi);
    read(m, "resample_interval", c.fine.resample_interval);
    read(m, "curb_class", c.curb_class);
  }
  if (j.contains("bev")) {
    const auto& m = j["bev"];
    reject_unknown(m, "bev", {"resolution", "width", "height", "x_range", "y_range", "height_slices", "dilation_kernel"});
    read(m, "resolution", c.bev.resolution);
    read(m, "width", c.bev.width);
    read(m, "height", c.bev.height);
    auto range = [&](const char* key, double& lo, double& hi) {
      if (!m.contains(key)) return;
      std::vector<double> r;
      read(m, key, r);
      if (r.size() != 2) throw InputError(std::string("bev.") + key + " must have two entries");
      lo = r[0];
      hi = r[1];
    };
    range("x_range", c.bev.x_min, c.bev.x_max);
    range("y_range", c.bev.y_min, c.bev.y_max);
    if (m.contains("height_slices")) {
      std::vector<std::vector<double>> slices;
      read(m, "height_slices", slices);
      c.bev.slices.clear();
      for (const auto& s : slices) {
        if (s.size() != 2) throw InputError("bev.height_slices entries must be [z_min, z_max]");
        c.bev.slices.push_back({s[0], s[1]});
      }
    }
    read(m, "dilation_kernel", c.bev.dilation_kernel);
  }
  if (j.contains("eval")) {
    const auto& m = j["eval"];
    reject_unknown(m, "eval", {"tolerance", "iou_thresholds", "neighborhood"});
    read(m, "tolerance", c.eval_tolerance);
    read(m, "iou_thresholds", c.iou_thresholds);
    if (m.contains("neighborhood")) {
      std::string n;
      read(m, "neighborhood", n);
      if (n == "chebyshev") {
        c.eval_neighborhood = Neighborhood::Chebyshev;
      } else if (n == "euclidean") {
        c.eval_neighborhood = Neighborhood::Euclidean;
      } else {
        throw InputError("eval.neighborhood must be chebyshev or euclidean");
      }
    }
  }
  if (j.contains("run")) {
    const auto& m = j["run"];
    reject_unknown(m, "run", {"seed", "workers", "frame_begin", "frame_end", "write_pointwise_labels", "write_bev"});
    read(m, "seed", c.seed);
    read(m, "workers", c.workers);
    read(m, "frame_begin", c.frame_begin);
    if (m.contains("frame_end") && !m["frame_end"].is_null()) {
      std::size_t e = 0;
      read(m, "frame_end", e);
      c.frame_end = e;
    }
    read(m, "write_pointwise_labels", c.write_pointwise_labels);
    read(m, "write_bev", c.write_bev);
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

void PipelineConfig::apply_env_overrides() {
  if (const char* s = std::getenv("CURBLABEL_SEQUENCE_DIR"); s && *s) sequence_dir = s;
  if (const char* s = std::getenv("CURBLABEL_OUTPUT_DIR"); s && *s) output_dir = s;
}

std::string PipelineConfig::hash() const { return fnv1a_hex(parameters_json().dump()); }

}  // namespace curblabel
