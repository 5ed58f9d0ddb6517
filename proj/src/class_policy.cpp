#include "curblabel/class_policy.hpp"

#include <algorithm>
#include <map>

#include "curblabel/error.hpp"

namespace curblabel {

namespace {

const std::map<ClassId, std::string>& names() {
  static const std::map<ClassId, std::string> table = {
      {0, "unlabeled"},          {1, "outlier"},
      {10, "car"},               {11, "bicycle"},
      {13, "bus"},               {15, "motorcycle"},
      {16, "on-rails"},          {18, "truck"},
      {20, "other-vehicle"},     {30, "person"},
      {31, "bicyclist"},         {32, "motorcyclist"},
      {40, "road"},              {44, "parking"},
      {48, "sidewalk"},          {49, "other-ground"},
      {50, "building"},          {51, "fence"},
      {52, "other-structure"},   {60, "lane-marking"},
      {70, "vegetation"},        {71, "trunk"},
      {72, "terrain"},           {80, "pole"},
      {81, "traffic-sign"},      {99, "other-object"},
      {252, "moving-car"},       {253, "moving-bicyclist"},
      {254, "moving-person"},    {255, "moving-motorcyclist"},
      {256, "moving-on-rails"},  {257, "moving-bus"},
      {258, "moving-truck"},     {259, "moving-other-vehicle"},
  };
  return table;
}

bool intersects(const std::set<ClassId>& a, const std::set<ClassId>& b) {
  return std::any_of(a.begin(), a.end(), [&](ClassId c) { return b.contains(c); });
}

}  // namespace

const std::set<ClassId>& kitti_class_table() {
  static const std::set<ClassId> table = [] {
    std::set<ClassId> s;
    for (const auto& [id, name] : names()) s.insert(id);
    return s;
  }();
  return table;
}

const std::string& kitti_class_name(ClassId id) {
  static const std::string unknown = "unknown";
  static const std::string curb = "curb";
  if (id == kitti_class::kCurb) return curb;
  auto it = names().find(id);
  return it == names().end() ? unknown : it->second;
}

ClassPolicy ClassPolicy::kitti_default() {
  ClassPolicy p;
  p.road_set = {kitti_class::kRoad};
  p.nonroad_set = {kitti_class::kSidewalk, kitti_class::kTerrain, kitti_class::kOtherGround, kitti_class::kVegetation};
  p.curbside_set = {kitti_class::kSidewalk, kitti_class::kVegetation};
  p.dynamic_set = {10, 11, 13, 15, 16, 18, 20, 30, 31, 32, 252, 253, 254, 255, 256, 257, 258, 259};
  p.class_table = kitti_class_table();
  return p;
}

void ClassPolicy::validate() const {
  if (intersects(dynamic_set, road_set) || intersects(dynamic_set, nonroad_set) ||
      intersects(dynamic_set, curbside_set)) {
    throw InputError("dynamic class set overlaps a static class set");
  }
  if (intersects(road_set, nonroad_set)) {
    throw InputError("road and non-road class sets overlap");
  }
}

}  // namespace curblabel
