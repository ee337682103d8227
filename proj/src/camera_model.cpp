#include "camgeo/camera_model.hpp"

#include "camgeo/error.hpp"

#include <Eigen/LU>

#include <set>
#include <sstream>
#include <utility>

namespace camgeo {

Intrinsics::Intrinsics(const Mat3& k, int width, int height)
    : k_(k), width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw ValidationError("intrinsics: width and height must be positive");
  if (!k.allFinite()) throw ValidationError("intrinsics: non-finite K");
  if (k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0)
    throw ValidationError("intrinsics: last row of K must be [0 0 1]");
  if (k(1, 0) != 0.0) throw ValidationError("intrinsics: K(1,0) must be zero");
  if (!(k(0, 0) > 0.0) || !(k(1, 1) > 0.0))
    throw ValidationError("intrinsics: fx and fy must be positive");
  if (k(0, 2) < 0.0 || k(0, 2) > width || k(1, 2) < 0.0 || k(1, 2) > height)
    throw ValidationError("intrinsics: principal point outside the image");
  // Upper triangular with positive diagonal, hence invertible.
  k_inv_ = k_.inverse();
}

Intrinsics Intrinsics::from_pinhole(double fx, double fy, double cx, double cy, int width,
                                    int height) {
  Mat3 k;
  k << fx, 0.0, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return {k, width, height};
}

Mat3 Intrinsics::scaled_to(int h, int w) const {
  const double sx = static_cast<double>(w) / width_;
  const double sy = static_cast<double>(h) / height_;
  Mat3 s = Mat3::Identity();
  s(0, 0) = sx;
  s(1, 1) = sy;
  return s * k_;
}

Extrinsics::Extrinsics(const Mat3& r, const Vec3& t) : r_(r), t_(t) {
  if (!is_rotation(r)) throw ValidationError("extrinsics: R is not a rotation (R^T R != I or det != 1)");
  if (!t.allFinite()) throw ValidationError("extrinsics: non-finite translation");
}

Extrinsics Extrinsics::from_world_to_camera(const Mat3& r_wc, const Vec3& t_wc) {
  return {r_wc.transpose(), -(r_wc.transpose() * t_wc)};
}

Extrinsics Extrinsics::compose(const Extrinsics& other) const {
  return {r_ * other.r_, r_ * other.t_ + t_, Unchecked{}};
}

Vec3 CameraPose::project(const Vec3& x_world) const {
  const Vec3 x = intrinsics.k() * extrinsics.world_to_camera(x_world);
  return x / x(2);
}

Rig::Rig(std::vector<std::string> views, std::map<std::string, NeighborPair> neighbors)
    : views_(std::move(views)), neighbors_(std::move(neighbors)) {
  const std::set<std::string> known(views_.begin(), views_.end());
  if (known.size() != views_.size()) throw ValidationError("rig: duplicate view id");
  auto require = [&](const std::string& v) {
    if (!known.contains(v)) throw ValidationError("rig: unknown view '" + v + "'");
  };
  for (const auto& [view, pair] : neighbors_) {
    require(view);
    if (pair.left) require(*pair.left);
    if (pair.right) require(*pair.right);
  }
  auto side = [&](const std::string& v, bool left) -> std::optional<std::string> {
    auto it = neighbors_.find(v);
    if (it == neighbors_.end()) return std::nullopt;
    return left ? it->second.left : it->second.right;
  };
  for (const auto& [view, pair] : neighbors_) {
    if (pair.right && side(*pair.right, true) != view) {
      throw ValidationError("rig: '" + *pair.right + "' is right of '" + view +
                            "' but does not list it as left neighbor");
    }
    if (pair.left && side(*pair.left, false) != view) {
      throw ValidationError("rig: '" + *pair.left + "' is left of '" + view +
                            "' but does not list it as right neighbor");
    }
  }
}

bool Rig::contains(const std::string& view) const {
  for (const auto& v : views_)
    if (v == view) return true;
  return false;
}

NeighborPair Rig::neighbors_of(const std::string& view) const {
  auto it = neighbors_.find(view);
  return it == neighbors_.end() ? NeighborPair{} : it->second;
}

Extrinsics relative_pose(const Extrinsics& local, const Extrinsics& neighbor) {
  const Mat3 rn_t = neighbor.rotation().transpose();
  return {rn_t * local.rotation(), rn_t * (local.translation() - neighbor.translation()),
          Extrinsics::Unchecked{}};
}

std::vector<Extrinsics> normalize_trajectory(const std::vector<Extrinsics>& poses) {
  if (poses.empty()) throw ValidationError("empty trajectory");
  std::vector<Extrinsics> out;
  out.reserve(poses.size());
  out.push_back(Extrinsics::identity());
  for (std::size_t i = 1; i < poses.size(); ++i) out.push_back(relative_pose(poses[i], poses[0]));
  return out;
}

} // namespace camgeo
