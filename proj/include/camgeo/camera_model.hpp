#pragma once

// Pinhole cameras, poses and rig topology.
//
// Pose convention: extrinsics are camera-to-world,
//
//     X_world = R * x_cam + t
//
// so t is the optical center in world coordinates and the columns of R are
// the camera axes expressed in world coordinates. Datasets that ship
// world-to-camera matrices must be inverted on ingestion (see
// Extrinsics::from_world_to_camera).

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace camgeo {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kRotationTolerance = 1e-9;

/// Cross-product matrix: skew(v) * w == v.cross(w).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 3, 3> skew(const Eigen::MatrixBase<Derived>& v) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, 3, 3> s;
  s << Scalar(0), -v(2), v(1),
       v(2), Scalar(0), -v(0),
       -v(1), v(0), Scalar(0);
  return s;
}

/// True when r^T r == I and det(r) == 1, both within `tol` (Frobenius / abs).
template <typename Derived>
bool is_rotation(const Eigen::MatrixBase<Derived>& r,
                 typename Derived::Scalar tol = typename Derived::Scalar(kRotationTolerance)) {
  using Scalar = typename Derived::Scalar;
  if (r.rows() != 3 || r.cols() != 3 || !r.allFinite()) return false;
  const auto orth = (r.transpose() * r - Eigen::Matrix<Scalar, 3, 3>::Identity()).norm();
  return orth <= tol && std::abs(r.determinant() - Scalar(1)) <= tol;
}

class Intrinsics {
public:
  /// Throws ValidationError unless k is invertible, k(2,2) == 1, fx, fy > 0
  /// and the principal point lies inside [0, width] x [0, height].
  Intrinsics(const Mat3& k, int width, int height);

  static Intrinsics from_pinhole(double fx, double fy, double cx, double cy, int width,
                                 int height);

  const Mat3& k() const { return k_; }
  const Mat3& k_inverse() const { return k_inv_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double fx() const { return k_(0, 0); }
  double fy() const { return k_(1, 1); }
  double cx() const { return k_(0, 2); }
  double cy() const { return k_(1, 2); }

  /// K for a sampling grid of `h` x `w` pixels over the same field of view.
  Mat3 scaled_to(int h, int w) const;

private:
  Mat3 k_;
  Mat3 k_inv_;
  int width_;
  int height_;
};

class Extrinsics {
public:
  /// Throws ValidationError when r is not a rotation within kRotationTolerance.
  Extrinsics(const Mat3& r, const Vec3& t);

  static Extrinsics identity() { return {Mat3::Identity(), Vec3::Zero()}; }
  /// Builds camera-to-world extrinsics from a world-to-camera (R_wc, t_wc).
  static Extrinsics from_world_to_camera(const Mat3& r_wc, const Vec3& t_wc);

  const Mat3& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }
  const Vec3& center() const { return t_; }

  Vec3 camera_to_world(const Vec3& x_cam) const { return r_ * x_cam + t_; }
  Vec3 world_to_camera(const Vec3& x_world) const { return r_.transpose() * (x_world - t_); }

  /// this ∘ other: applies `other` first.
  Extrinsics compose(const Extrinsics& other) const;

private:
  struct Unchecked {};
  // Products of validated rotations; re-validating would reject legitimate
  // round-off accumulation at the 1e-9 boundary.
  Extrinsics(const Mat3& r, const Vec3& t, Unchecked) : r_(r), t_(t) {}
  friend Extrinsics relative_pose(const Extrinsics& local, const Extrinsics& neighbor);

  Mat3 r_;
  Vec3 t_;
};

struct CameraPose {
  Intrinsics intrinsics;
  Extrinsics extrinsics;
  std::size_t frame_index = 0;
  std::string view_id;

  /// Projects a world point to homogeneous native-resolution pixel coordinates
  /// (third component 1). Points behind the camera are projected anyway.
  Vec3 project(const Vec3& x_world) const;
};

struct NeighborPair {
  std::optional<std::string> left;
  std::optional<std::string> right;
};

class Rig {
public:
  /// Throws ValidationError when a neighbor is not a listed view or the
  /// relation is not symmetric (B right of A <=> A left of B).
  Rig(std::vector<std::string> views, std::map<std::string, NeighborPair> neighbors);

  const std::vector<std::string>& views() const { return views_; }
  const std::map<std::string, NeighborPair>& neighbor_map() const { return neighbors_; }
  bool contains(const std::string& view) const;
  NeighborPair neighbors_of(const std::string& view) const;

private:
  std::vector<std::string> views_;
  std::map<std::string, NeighborPair> neighbors_;
};

/// Pose of `local` expressed in the camera frame of `neighbor`:
/// R = R_N^T R_L, t = R_N^T (t_L - t_N). Equivalently neighbor.compose(result)
/// == local, and x_N = R x_L + t maps local camera coordinates to neighbor
/// camera coordinates.
Extrinsics relative_pose(const Extrinsics& local, const Extrinsics& neighbor);

/// Re-expresses every pose relative to the first one; output[0] is identity.
/// Throws ValidationError("empty trajectory") on an empty list.
std::vector<Extrinsics> normalize_trajectory(const std::vector<Extrinsics>& poses);

} // namespace camgeo
