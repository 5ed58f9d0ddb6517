#pragma once

#include <set>
#include <string>

#include "curblabel/types.hpp"

namespace curblabel {

/// SemanticKITTI raw label codes used by the defaults.
namespace kitti_class {
inline constexpr ClassId kUnlabeled = 0;
inline constexpr ClassId kCar = 10;
inline constexpr ClassId kRoad = 40;
inline constexpr ClassId kParking = 44;
inline constexpr ClassId kSidewalk = 48;
inline constexpr ClassId kOtherGround = 49;
inline constexpr ClassId kBuilding = 50;
inline constexpr ClassId kVegetation = 70;
inline constexpr ClassId kTerrain = 72;
/// Unused in the base table; assigned to points relabeled as curb.
inline constexpr ClassId kCurb = 45;
}  // namespace kitti_class

/// The full set of raw label codes of the base dataset.
const std::set<ClassId>& kitti_class_table();
const std::string& kitti_class_name(ClassId id);

/// Which semantic classes count as road, non-road, curbside and dynamic.
struct ClassPolicy {
  std::set<ClassId> road_set;
  std::set<ClassId> nonroad_set;
  std::set<ClassId> curbside_set;
  std::set<ClassId> dynamic_set;
  std::set<ClassId> class_table;

  /// Road = {road}; non-road = {sidewalk, terrain, other-ground, vegetation};
  /// curbside = {sidewalk, vegetation}; dynamic = vehicles, persons, riders and all moving-* codes.
  static ClassPolicy kitti_default();

  bool is_road(ClassId c) const { return road_set.contains(c); }
  bool is_nonroad(ClassId c) const { return nonroad_set.contains(c); }
  bool is_curbside(ClassId c) const { return curbside_set.contains(c); }
  bool is_dynamic(ClassId c) const { return dynamic_set.contains(c); }
  bool is_known(ClassId c) const { return class_table.empty() || class_table.contains(c); }

  /// Throws InputError if the dynamic set intersects another set or road and non-road overlap.
  void validate() const;
};

}  // namespace curblabel
