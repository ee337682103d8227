#include "camgeo/error.hpp"
#include "camgeo/plucker.hpp"
#include "camgeo/random.hpp"

#include <gtest/gtest.h>

#include <random>

namespace camgeo {
namespace {

// Distance from point c to the line with plucker coordinates (d, m), through
// the line's closest point to the origin p0 = d x m / |d|^2.
double line_point_distance(const Vec3& d, const Vec3& m, const Vec3& c) {
  const Vec3 p0 = d.cross(m) / d.squaredNorm();
  return (c - p0).cross(d).norm() / d.norm();
}

void expect_valid_rays(const PluckerTensor& t, double tol) {
  for (int f = 0; f < t.frames(); ++f) {
    const Vec3& c = t.poses()[static_cast<std::size_t>(f)].extrinsics.center();
    for (int v = 0; v < t.height(); ++v)
      for (int u = 0; u < t.width(); ++u) {
        const Vec3 d = t.direction(f, v, u), m = t.moment(f, v, u);
        EXPECT_NEAR(d.norm(), 1.0, tol);
        EXPECT_LE(std::abs(m.dot(d)), tol);
        EXPECT_LE(line_point_distance(d, m, c), tol);
      }
  }
}

CameraPose identity_pose(int size = 1) {
  return {Intrinsics(Mat3::Identity(), size, size), Extrinsics::identity(), 0, "cam"};
}

TEST(PluckerGrid, IdentityCameraSinglePixel) {
  const auto t = plucker_grid(identity_pose(), 1, 1);
  EXPECT_EQ(t.shape(), (std::vector<std::size_t>{1, 6, 1, 1}));
  const Vec3 expected = Vec3(0.5, 0.5, 1.0).normalized();
  EXPECT_LE((t.direction(0, 0, 0) - expected).norm(), 1e-15);
  EXPECT_EQ(t.moment(0, 0, 0), Vec3::Zero());
}

TEST(PluckerGrid, MomentIsCenterCrossDirection) {
  // 3x3 native image, principal point at the center pixel's center.
  const CameraPose pose{Intrinsics::from_pinhole(1, 1, 1.5, 1.5, 3, 3),
                        Extrinsics(Mat3::Identity(), Vec3(1, 0, 0)), 0, "cam"};
  const auto t = plucker_grid(pose, 3, 3);
  EXPECT_EQ(t.direction(0, 1, 1), Vec3(0, 0, 1));
  EXPECT_EQ(t.moment(0, 1, 1), Vec3(0, -1, 0));
}

TEST(PluckerGrid, RandomPosesPassIncidenceOracle) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) expect_valid_rays(plucker_grid(random_pose(rng), 4, 4), 1e-9);
}

TEST(PluckerGrid, PixelCentersRescaleToNativeResolution) {
  std::mt19937_64 rng(12);
  const auto pose = random_pose(rng);
  const auto t = plucker_grid(pose, 6, 8);
  const double sx = pose.intrinsics.width() / 8.0, sy = pose.intrinsics.height() / 6.0;
  for (int v = 0; v < 6; ++v)
    for (int u = 0; u < 8; ++u) {
      // Oracle: back-project by hand, using the inverse of K.
      const Vec3 cam = pose.intrinsics.k().inverse() * Vec3((u + 0.5) * sx, (v + 0.5) * sy, 1);
      const Vec3 d = (pose.extrinsics.rotation() * cam).normalized();
      EXPECT_LE((t.direction(0, v, u) - d).norm(), 1e-12);
    }
}

TEST(PluckerGrid, ResolutionEquivariance) {
  std::mt19937_64 rng(13);
  const auto pose = random_pose(rng);
  const auto coarse = plucker_grid(pose, 5, 7);
  const auto fine = plucker_grid(pose, 10, 14);
  const Mat3 rt = pose.extrinsics.rotation().transpose();
  for (int v = 0; v < 5; ++v)
    for (int u = 0; u < 7; ++u) {
      // Average of the four child rays on the z = 1 image plane is the ray
      // through the block center.
      Vec3 sum = Vec3::Zero();
      for (int dv = 0; dv < 2; ++dv)
        for (int du = 0; du < 2; ++du) {
          const Vec3 cam = rt * fine.direction(0, 2 * v + dv, 2 * u + du);
          sum += cam / cam.z();
        }
      const Vec3 center = (pose.extrinsics.rotation() * (sum / 4.0)).normalized();
      EXPECT_LE((coarse.direction(0, v, u) - center).norm(), 1e-12);
    }
}

TEST(PluckerGrid, RotationEquivariance) {
  std::mt19937_64 rng(14);
  const auto pose = random_pose(rng);
  const Mat3 q = random_rotation(rng);
  CameraPose rotated = pose;
  rotated.extrinsics = Extrinsics(q * pose.extrinsics.rotation(), pose.extrinsics.translation());
  const auto a = plucker_grid(pose, 4, 5);
  const auto b = plucker_grid(rotated, 4, 5);
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 5; ++u)
      EXPECT_LE((b.direction(0, v, u) - q * a.direction(0, v, u)).norm(), 1e-9);
}

TEST(PluckerTrajectory, IdenticalPosesNormalizeToIdentityGrid) {
  std::mt19937_64 rng(15);
  const auto pose = random_pose(rng);
  const auto t = plucker_trajectory({pose, pose, pose}, 4, 4, true);
  CameraPose canonical = pose;
  canonical.extrinsics = Extrinsics::identity();
  const auto reference = plucker_grid(canonical, 4, 4);
  ASSERT_EQ(t.frames(), 3);
  for (int f = 0; f < 3; ++f) {
    EXPECT_LE((t.frame(f).topRows<3>() - reference.frame(0).topRows<3>()).norm(), 1e-12);
    EXPECT_LE(t.frame(f).bottomRows<3>().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PluckerTrajectory, UnnormalizedSinglePoseMatchesGrid) {
  std::mt19937_64 rng(16);
  const auto pose = random_pose(rng);
  EXPECT_EQ(plucker_trajectory({pose}, 3, 5, false).frame(0), plucker_grid(pose, 3, 5).frame(0));
}

TEST(PluckerTrajectory, ForwardDollyMomentsGrowLinearly) {
  const auto k = Intrinsics::from_pinhole(8, 8, 4, 4, 8, 8);
  std::vector<CameraPose> poses;
  for (int f = 0; f < 3; ++f)
    poses.push_back({k, Extrinsics(Mat3::Identity(), Vec3(0.3, -0.2, 0.5 * f)),
                     static_cast<std::size_t>(f), "cam"});
  const auto t = plucker_trajectory(poses, 4, 4, true);
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 4; ++u) {
      const Vec3 d = t.direction(0, v, u);
      EXPECT_EQ(t.moment(0, v, u), Vec3::Zero());
      for (int f = 1; f < 3; ++f) {
        // Relative center after normalization is (0, 0, 0.5 f); m = c x d.
        const Vec3 expected(-0.5 * f * d.y(), 0.5 * f * d.x(), 0.0);
        EXPECT_LE((t.moment(f, v, u) - expected).norm(), 1e-12);
      }
      EXPECT_LE((t.moment(2, v, u) - 2.0 * t.moment(1, v, u)).norm(), 1e-12);
    }
}

TEST(PluckerTrajectory, Errors) {
  std::mt19937_64 rng(17);
  EXPECT_THROW(plucker_trajectory({}, 2, 2, true), ValidationError);
  auto a = random_pose(rng, "a");
  auto b = random_pose(rng, "b");
  EXPECT_THROW(plucker_trajectory({a, b}, 2, 2, false), ValidationError);
  EXPECT_THROW(plucker_grid(a, 0, 2), ValidationError);
}

TEST(Pyramid, SameSizeLevelIsIdentical) {
  std::mt19937_64 rng(18);
  const auto t = plucker_grid(random_pose(rng), 6, 6);
  const auto levels = downsample_pyramid(t, ResolutionPyramid({{6, 6}}));
  ASSERT_EQ(levels.size(), 1u);
  EXPECT_EQ(levels[0].frame(0), t.frame(0));
}

TEST(Pyramid, DownsampledRaysStillPassThroughCenter) {
  std::mt19937_64 rng(19);
  const auto t = plucker_trajectory({random_pose(rng), random_pose(rng)}, 8, 8, true);
  const auto levels = downsample_pyramid(t, ResolutionPyramid::halving(8, 8, 2));
  ASSERT_EQ(levels.size(), 2u);
  EXPECT_EQ(levels[1].height(), 4);
  expect_valid_rays(levels[1], 1e-9);
}

TEST(Pyramid, ShapesFollowLevels) {
  std::mt19937_64 rng(20);
  const auto t = plucker_grid(random_pose(rng), 8, 16);
  const auto levels = downsample_pyramid(t, ResolutionPyramid({{8, 16}, {4, 8}, {2, 4}}));
  ASSERT_EQ(levels.size(), 3u);
  EXPECT_EQ(levels[0].shape(), (std::vector<std::size_t>{1, 6, 8, 16}));
  EXPECT_EQ(levels[1].shape(), (std::vector<std::size_t>{1, 6, 4, 8}));
  EXPECT_EQ(levels[2].shape(), (std::vector<std::size_t>{1, 6, 2, 4}));
}

TEST(Pyramid, Errors) {
  std::mt19937_64 rng(21);
  const auto t = plucker_grid(random_pose(rng), 4, 4);
  EXPECT_THROW(downsample_pyramid(t, ResolutionPyramid({{8, 8}, {4, 4}})), ValidationError);
  EXPECT_THROW(ResolutionPyramid({{8, 8}, {3, 4}}), ValidationError);
  EXPECT_THROW(ResolutionPyramid({{1, 1}, {0, 0}}), ValidationError);
  EXPECT_THROW(ResolutionPyramid({}), ValidationError);
}

TEST(PluckerTensor, FlattenIsRowMajorFramesChannelsRowsCols) {
  std::mt19937_64 rng(22);
  const auto t = plucker_trajectory({random_pose(rng), random_pose(rng)}, 2, 3, false);
  const auto flat = t.flatten();
  ASSERT_EQ(flat.size(), 2u * 6 * 2 * 3);
  std::size_t i = 0;
  for (int f = 0; f < 2; ++f)
    for (int c = 0; c < 6; ++c)
      for (int v = 0; v < 2; ++v)
        for (int u = 0; u < 3; ++u) EXPECT_EQ(flat[i++], t.at(f, c, v, u));
}

} // namespace
} // namespace camgeo
