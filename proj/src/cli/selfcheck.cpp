#include "camgeo/cli/commands.hpp"

#include "camgeo/gradcheck.hpp"
#include "camgeo/injection.hpp"
#include "camgeo/plucker.hpp"
#include "camgeo/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace camgeo::cli {

namespace {

struct SuiteResult {
  bool pass = true;
  std::string detail;
};

SuiteResult zero_init_identity() {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pretrained = AttentionParams::random(2, 2, 4, rng);
    const auto weights = InjectionBlockWeights::fresh(pretrained);
    const auto z = LatentFeature::random(3, 4, 2, 2, rng);
    const auto p = LatentFeature::random(3, 6, 2, 2, rng);
    if (!(inject_camera(z, p, weights) == temporal_attention(z, pretrained)))
      return {false, "trial " + std::to_string(trial) + " differs from the pretrained path"};
  }
  return {true, "10 random (z, p)"};
}

SuiteResult plucker_incidence() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto pose = random_pose(rng);
    const auto grid = plucker_grid(pose, 8, 8);
    const Vec3& c = pose.extrinsics.center();
    for (int v = 0; v < 8; ++v)
      for (int u = 0; u < 8; ++u) {
        const Vec3 d = grid.direction(0, v, u), m = grid.moment(0, v, u);
        worst = std::max({worst, (c.cross(d) - m).norm() / d.norm(), std::abs(m.dot(d))});
      }
  }
  std::ostringstream s;
  s << "max distance " << worst;
  return {worst <= 1e-9, s.str()};
}

SuiteResult fundamental_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> xy(-1.0, 1.0), depth(2.0, 6.0);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto local = random_pose(rng, "local");
    const auto neighbor = random_pose(rng, "neighbor");
    const auto f = fundamental_matrix(local, neighbor);
    for (int i = 0; i < 20;) {
      const Vec3 x_world = local.extrinsics.camera_to_world(Vec3(xy(rng), xy(rng), depth(rng)));
      if (std::abs(neighbor.extrinsics.world_to_camera(x_world).z()) < 0.5) continue;
      worst = std::max(worst, f.algebraic_residual(local.project(x_world), neighbor.project(x_world)));
      ++i;
    }
  }
  std::ostringstream s;
  s << "max residual " << worst;
  return {worst <= 1e-9, s.str()};
}

SuiteResult gradient_checks() {
  std::mt19937_64 rng(404);
  const auto params = AttentionParams::random(2, 2, 4, rng);
  const auto z = LatentFeature::random(3, 4, 1, 2, rng);
  const auto p = LatentFeature::random(3, 6, 1, 2, rng);
  auto weights = InjectionBlockWeights::fresh(params);
  std::normal_distribution<double> n(0.0, 0.3);
  weights.linear_out = weights.linear_out.unaryExpr([&](double) { return n(rng); });

  const auto cond = LatentFeature::random(1, 3, 2, 4, rng);
  const auto cross_params = AttentionParams::random(2, 2, 3, rng);
  const auto zc = LatentFeature::random(1, 4, 2, 2, rng);
  EpipolarMask mask{2, 2, 0.5, TauMode::PerRow, RowMajorMatrixXb::Zero(4, 8)};
  for (int q = 0; q < 4; ++q)
    for (int k = 0; k < 8; ++k) mask.bits(q, k) = (q + k) % 2 == 0;

  double worst = 0.0;
  for (const Objective& o : {temporal_attention_objective(z, params),
                             inject_camera_objective(z, p, weights),
                             masked_cross_attention_objective(zc, cond, mask, cross_params)})
    worst = std::max(worst, finite_difference_check(o.function, o.point, 1e-5).max_relative_error);
  std::ostringstream s;
  s << "max relative error " << worst;
  return {worst <= 1e-4, s.str()};
}

} // namespace

int cmd_selfcheck(std::ostream& stdout_) {
  const std::vector<std::pair<std::string, std::function<SuiteResult()>>> suites{
      {"zero-init-identity", zero_init_identity},
      {"plucker-incidence", plucker_incidence},
      {"fundamental-oracle", fundamental_oracle},
      {"gradient-check", gradient_checks},
  };
  bool all = true;
  for (const auto& [name, run] : suites) {
    SuiteResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    all = all && r.pass;
    stdout_ << (r.pass ? "PASS " : "FAIL ") << name << " (" << r.detail << ")\n";
  }
  return all ? kOk : kGeometry;
}

} // namespace camgeo::cli
