#pragma once

// Per-pixel plucker ray embeddings.
//
// Each pixel (u, v) of an h x w grid maps to the ray through its center
// (u + 0.5, v + 0.5), rescaled to the intrinsics' native resolution. The
// ray is stored as six channels: the unit world direction d followed by the
// moment m = c x d, where c is the optical center.

#include "camgeo/camera_model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <utility>
#include <vector>

namespace camgeo {

using PluckerColumns = Eigen::Matrix<double, 6, Eigen::Dynamic>;

class PluckerTensor {
public:
  PluckerTensor(int h, int w, std::vector<PluckerColumns> frames, std::vector<CameraPose> poses);

  int frames() const { return static_cast<int>(frames_.size()); }
  int height() const { return h_; }
  int width() const { return w_; }

  /// 6 x (h*w) block for one frame; column index is v * w + u.
  const PluckerColumns& frame(int f) const { return frames_[static_cast<std::size_t>(f)]; }
  double at(int f, int channel, int v, int u) const { return frame(f)(channel, v * w_ + u); }
  Vec3 direction(int f, int v, int u) const { return frame(f).col(v * w_ + u).head<3>(); }
  Vec3 moment(int f, int v, int u) const { return frame(f).col(v * w_ + u).tail<3>(); }

  /// Poses the grid was computed from (after any first-frame normalization).
  const std::vector<CameraPose>& poses() const { return poses_; }

  /// Row-major (frames, 6, h, w) copy.
  std::vector<double> flatten() const;
  std::vector<std::size_t> shape() const;

private:
  int h_;
  int w_;
  std::vector<PluckerColumns> frames_;
  std::vector<CameraPose> poses_;
};

class ResolutionPyramid {
public:
  /// Each level must be the integer half of the previous one, all dims >= 1.
  explicit ResolutionPyramid(std::vector<std::pair<int, int>> levels);

  /// `count` levels starting at (h, w), halving each time.
  static ResolutionPyramid halving(int h, int w, int count);

  const std::vector<std::pair<int, int>>& levels() const { return levels_; }

private:
  std::vector<std::pair<int, int>> levels_;
};

/// Unit ray direction (world frame) through native pixel coordinate (x, y).
Vec3 pixel_ray(const CameraPose& pose, double x, double y);

PluckerTensor plucker_grid(const CameraPose& pose, int h, int w);

/// Stacks one grid per pose. With `normalize_to_first`, extrinsics are first
/// re-expressed relative to poses[0]. Throws ValidationError on an empty list
/// or mixed view ids.
PluckerTensor plucker_trajectory(const std::vector<CameraPose>& poses, int h, int w,
                                 bool normalize_to_first);

/// Recomputes the embedding at every pyramid level from the tensor's poses.
/// Throws ValidationError when a level exceeds the source resolution.
std::vector<PluckerTensor> downsample_pyramid(const PluckerTensor& t,
                                              const ResolutionPyramid& levels);

} // namespace camgeo
