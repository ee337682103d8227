#pragma once

// Seeded generators for test and self-check inputs.

#include "camgeo/camera_model.hpp"

#include <Eigen/Geometry>

#include <random>
#include <string>

namespace camgeo {

/// Uniform rotation from a normalized Gaussian quaternion.
inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  return q.normalized().toRotationMatrix();
}

inline Vec3 random_vector(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

inline Intrinsics random_intrinsics(std::mt19937_64& rng, int width = 64, int height = 48) {
  std::uniform_real_distribution<double> f(0.6, 1.6), c(0.35, 0.65);
  return Intrinsics::from_pinhole(f(rng) * width, f(rng) * width, c(rng) * width,
                                  c(rng) * height, width, height);
}

inline CameraPose random_pose(std::mt19937_64& rng, const std::string& view = "cam") {
  return {random_intrinsics(rng), Extrinsics(random_rotation(rng), random_vector(rng, -3.0, 3.0)), 0,
          view};
}

} // namespace camgeo
