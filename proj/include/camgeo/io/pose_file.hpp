#pragma once

// Line-oriented pose files.
//
//   # comment
//   convention camera_to_world|world_to_camera    (optional, before poses)
//   view <id> <fx> <fy> <cx> <cy> <width> <height>
//   neighbors <id> <left-id|-> <right-id|->
//   pose <id> <frame> <r00 r01 r02 r10 r11 r12 r20 r21 r22> <tx ty tz>
//   poseq <id> <frame> <qw qx qy qz> <tx ty tz>
//
// Views must be declared before their poses. Errors cite "<source>:<line>".

#include "camgeo/camera_model.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace camgeo::io {

struct PoseDocument {
  std::vector<std::string> views;
  std::map<std::string, Intrinsics> intrinsics;
  std::map<std::string, NeighborPair> neighbors;
  std::map<std::string, std::vector<CameraPose>> trajectories; // ascending frame_index

  Rig rig() const;
  /// Poses of view `view`; throws ValidationError if the view is unknown or empty.
  const std::vector<CameraPose>& trajectory(const std::string& view) const;
  /// One pose per view at `frame`; throws ValidationError naming a view without it.
  std::map<std::string, CameraPose> frame_poses(std::size_t frame) const;
};

PoseDocument parse_pose_file(std::istream& in, const std::string& source = "<input>");
PoseDocument read_pose_file(const std::filesystem::path& path);

/// Canonical text form; parse_pose_file(format_pose_file(d)) reproduces d.
std::string format_pose_file(const PoseDocument& doc);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace camgeo::io
