#include "curblabel/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "curblabel/error.hpp"

namespace curblabel {

namespace {

void require_same_shape(int w0, int h0, int w1, int h1) {
  if (w0 != w1 || h0 != h1) {
    throw InputError("mask shapes differ: " + std::to_string(w0) + "x" + std::to_string(h0) + " vs " +
                     std::to_string(w1) + "x" + std::to_string(h1));
  }
}

std::vector<std::pair<int, int>> neighborhood_offsets(int tolerance, Neighborhood neighborhood) {
  std::vector<std::pair<int, int>> offsets;
  for (int dr = -tolerance; dr <= tolerance; ++dr) {
    for (int dc = -tolerance; dc <= tolerance; ++dc) {
      if (neighborhood == Neighborhood::Euclidean && dc * dc + dr * dr > tolerance * tolerance) continue;
      offsets.emplace_back(dc, dr);
    }
  }
  return offsets;
}

void fill_rates(EvalReport& r) {
  const std::size_t predicted = r.tp + r.fp;
  if (predicted == 0 && r.gt_positives == 0) {
    r.precision = 1.0;
    r.recall = 1.0;
  } else {
    r.precision = predicted == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(predicted);
    r.recall = r.gt_positives == 0
                   ? 1.0
                   : static_cast<double>(r.gt_positives - r.fn) / static_cast<double>(r.gt_positives);
  }
  r.f1 = f1_score(r.precision, r.recall);
}

ThresholdResult threshold_rates(double thr, std::size_t tp, std::size_t n_pred, std::size_t n_gt) {
  ThresholdResult t;
  t.iou_threshold = thr;
  t.tp = tp;
  t.fp = n_pred - tp;
  t.fn = n_gt - tp;
  if (n_pred == 0 && n_gt == 0) {
    t.precision = t.recall = 1.0;
  } else {
    t.precision = n_pred == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_pred);
    t.recall = n_gt == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  t.f1 = f1_score(t.precision, t.recall);
  return t;
}

// Sorted linear pixel indices of each instance id after dilation.
std::map<std::uint32_t, std::vector<std::size_t>> dilated_instances(const InstanceMask& mask, int tolerance,
                                                                     Neighborhood neighborhood) {
  std::map<std::uint32_t, std::vector<std::size_t>> raw;
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    if (mask.data[i] != 0) raw[mask.data[i]].push_back(i);
  }
  if (tolerance == 0) return raw;
  const auto offsets = neighborhood_offsets(tolerance, neighborhood);
  std::map<std::uint32_t, std::vector<std::size_t>> out;
  for (auto& [id, pixels] : raw) {
    std::vector<std::size_t> grown;
    grown.reserve(pixels.size() * offsets.size());
    for (std::size_t i : pixels) {
      const int c = static_cast<int>(i % mask.width);
      const int r = static_cast<int>(i / mask.width);
      for (const auto& [dc, dr] : offsets) {
        if (mask.contains(c + dc, r + dr)) grown.push_back(static_cast<std::size_t>(r + dr) * mask.width + (c + dc));
      }
    }
    std::sort(grown.begin(), grown.end());
    grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
    out.emplace(id, std::move(grown));
  }
  return out;
}

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

Mask dilate_radius(const Mask& mask, int tolerance, Neighborhood neighborhood) {
  if (tolerance < 0) throw InputError("tolerance must be non-negative");
  if (tolerance == 0) return mask;
  if (neighborhood == Neighborhood::Chebyshev) return dilate(mask, 2 * tolerance + 1);
  const auto offsets = neighborhood_offsets(tolerance, neighborhood);
  Mask out(mask.width, mask.height, 0);
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      if (!mask.at(c, r)) continue;
      for (const auto& [dc, dr] : offsets) {
        if (out.contains(c + dc, r + dr)) out.at(c + dc, r + dr) = 1;
      }
    }
  }
  return out;
}

EvalReport binary_metrics(const Mask& pred, const Mask& gt, int tolerance, Neighborhood neighborhood) {
  require_same_shape(pred.width, pred.height, gt.width, gt.height);
  const Mask gt_near = dilate_radius(gt, tolerance, neighborhood);
  const Mask pred_near = dilate_radius(pred, tolerance, neighborhood);
  EvalReport r;
  r.tolerance_pixels = tolerance;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    if (pred.data[i]) {
      if (gt_near.data[i]) {
        ++r.tp;
      } else {
        ++r.fp;
      }
    }
    if (gt.data[i]) {
      ++r.gt_positives;
      if (!pred_near.data[i]) ++r.fn;
    }
  }
  fill_rates(r);
  return r;
}

IouTable instance_iou(const InstanceMask& pred, const InstanceMask& gt, int tolerance, Neighborhood neighborhood) {
  require_same_shape(pred.width, pred.height, gt.width, gt.height);
  if (tolerance < 0) throw InputError("tolerance must be non-negative");
  const auto p = dilated_instances(pred, tolerance, neighborhood);
  const auto g = dilated_instances(gt, tolerance, neighborhood);
  IouTable t;
  for (const auto& [id, px] : p) t.pred_ids.push_back(id);
  for (const auto& [id, px] : g) t.gt_ids.push_back(id);
  for (const auto& [pid, ppx] : p) {
    std::vector<double> row;
    for (const auto& [gid, gpx] : g) {
      const std::size_t inter = intersection_size(ppx, gpx);
      const std::size_t uni = ppx.size() + gpx.size() - inter;
      row.push_back(uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni));
    }
    t.iou.push_back(std::move(row));
  }
  return t;
}

EvalReport instance_metrics(const InstanceMask& pred, const InstanceMask& gt, std::span<const double> iou_thresholds,
                            int tolerance, Neighborhood neighborhood) {
  if (iou_thresholds.empty()) throw InputError("at least one IoU threshold is required");
  const IouTable table = instance_iou(pred, gt, tolerance, neighborhood);

  struct Pair {
    double iou;
    std::size_t p, g;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < table.pred_ids.size(); ++i) {
    for (std::size_t j = 0; j < table.gt_ids.size(); ++j) {
      if (table.iou[i][j] > 0.0) pairs.push_back({table.iou[i][j], i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.p != b.p) return a.p < b.p;
    return a.g < b.g;
  });
  std::vector<char> pred_used(table.pred_ids.size(), 0);
  std::vector<char> gt_used(table.gt_ids.size(), 0);
  std::vector<double> matched;  // IoU of each accepted match
  for (const Pair& pr : pairs) {
    if (pred_used[pr.p] || gt_used[pr.g]) continue;
    pred_used[pr.p] = gt_used[pr.g] = 1;
    matched.push_back(pr.iou);
  }

  EvalReport r;
  r.tolerance_pixels = tolerance;
  for (double thr : iou_thresholds) {
    const auto tp = static_cast<std::size_t>(
        std::count_if(matched.begin(), matched.end(), [thr](double v) { return v >= thr; }));
    r.per_threshold.push_back(threshold_rates(thr, tp, table.pred_ids.size(), table.gt_ids.size()));
  }
  const ThresholdResult& first = r.per_threshold.front();
  r.precision = first.precision;
  r.recall = first.recall;
  r.f1 = first.f1;
  r.tp = first.tp;
  r.fp = first.fp;
  r.fn = first.fn;
  r.gt_positives = table.gt_ids.size();
  return r;
}

EvalReport combine_binary(std::span<const EvalReport> reports) {
  EvalReport r;
  for (const auto& x : reports) {
    r.tolerance_pixels = x.tolerance_pixels;
    r.tp += x.tp;
    r.fp += x.fp;
    r.fn += x.fn;
    r.gt_positives += x.gt_positives;
  }
  fill_rates(r);
  return r;
}

EvalReport combine_instance(std::span<const EvalReport> reports) {
  EvalReport r;
  if (reports.empty()) return r;
  r.tolerance_pixels = reports.front().tolerance_pixels;
  const std::size_t n_thr = reports.front().per_threshold.size();
  for (std::size_t k = 0; k < n_thr; ++k) {
    std::size_t tp = 0, n_pred = 0, n_gt = 0;
    for (const auto& x : reports) {
      if (x.per_threshold.size() != n_thr) throw InputError("instance reports use different thresholds");
      const auto& t = x.per_threshold[k];
      tp += t.tp;
      n_pred += t.tp + t.fp;
      n_gt += t.tp + t.fn;
    }
    r.per_threshold.push_back(threshold_rates(reports.front().per_threshold[k].iou_threshold, tp, n_pred, n_gt));
  }
  if (!r.per_threshold.empty()) {
    const auto& first = r.per_threshold.front();
    r.precision = first.precision;
    r.recall = first.recall;
    r.f1 = first.f1;
    r.tp = first.tp;
    r.fp = first.fp;
    r.fn = first.fn;
    r.gt_positives = first.tp + first.fn;
  }
  return r;
}

void DatasetStats::add(const FrameAnnotation& annotation) {
  ++frames;
  instances += annotation.curbs.size();
  for (const auto& c : annotation.curbs) points += c.points.size();
}

DatasetStats dataset_stats(std::span<const FrameAnnotation> annotations) {
  DatasetStats s;
  for (const auto& a : annotations) s.add(a);
  return s;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "tolerance %d px  precision %.4f  recall %.4f  f1 %.4f  (tp %zu fp %zu fn %zu)\n",
                report.tolerance_pixels, report.precision, report.recall, report.f1, report.tp, report.fp,
                report.fn);
  os << line;
  if (!report.per_threshold.empty()) {
    os << "  iou    precision  recall   f1       tp     fp     fn\n";
    for (const auto& t : report.per_threshold) {
      std::snprintf(line, sizeof line, "  %.2f   %.4f     %.4f   %.4f   %-6zu %-6zu %-6zu\n", t.iou_threshold,
                    t.precision, t.recall, t.f1, t.tp, t.fp, t.fn);
      os << line;
    }
  }
  return os.str();
}

void write_report(const EvalReport& report, const std::filesystem::path& path) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  std::map<std::string, std::string> kv;
  kv["precision"] = num(report.precision);
  kv["recall"] = num(report.recall);
  kv["f1"] = num(report.f1);
  kv["tolerance_pixels"] = std::to_string(report.tolerance_pixels);
  kv["tp"] = std::to_string(report.tp);
  kv["fp"] = std::to_string(report.fp);
  kv["fn"] = std::to_string(report.fn);
  for (const auto& t : report.per_threshold) {
    const std::string k = "iou_" + num(t.iou_threshold).substr(0, 4);
    kv[k + ".precision"] = num(t.precision);
    kv[k + ".recall"] = num(t.recall);
    kv[k + ".f1"] = num(t.f1);
    kv[k + ".tp"] = std::to_string(t.tp);
    kv[k + ".fp"] = std::to_string(t.fp);
    kv[k + ".fn"] = std::to_string(t.fn);
  }
  write_metadata(path, kv);
}

}  // namespace curblabel
