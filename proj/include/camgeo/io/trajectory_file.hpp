#pragma once

// Pose-list files for trajectory evaluation, one block per sample:
//
//   convention camera_to_world|world_to_camera    (optional, first)
//   sample <id>
//   frame <index> <r00 .. r22> <tx ty tz>
//   frame <index> missing
//
// Frames of a sample must be numbered 0, 1, 2, ... A sample without frames,
// or with any missing frame, is a failed registration.

#include "camgeo/pose_metrics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace camgeo::io {

std::vector<EstimatedTrajectory> parse_trajectory_file(std::istream& in,
                                                       const std::string& source = "<input>");
std::vector<EstimatedTrajectory> read_trajectory_file(const std::filesystem::path& path);

/// Ground truth must have every frame; throws ValidationError otherwise.
std::vector<GroundTruthTrajectory> to_ground_truth(const std::vector<EstimatedTrajectory>& t);

std::string format_trajectory_file(const std::vector<EstimatedTrajectory>& samples);

} // namespace camgeo::io
