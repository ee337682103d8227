#pragma once

// Trajectory error metrics weighted by pose-estimation success rate, and the
// condition-dropout sampler used during training.

#include "camgeo/camera_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace camgeo {

/// Geodesic angle arccos((tr(A B^T) - 1) / 2) in [0, pi].
///
/// Evaluated as atan2(|vee(M - M^T)| / 2, (tr(M) - 1) / 2) with M = A B^T:
/// the same angle, well conditioned near 0. M(i, j) and M(j, i) are summed
/// in the same order, so M is exactly symmetric and the angle exactly zero
/// when A == B. The cosine term is clamped to [-1, 1].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar rotation_geodesic(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Scalar m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Scalar s(0);
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(j, k);
      m[i][j] = s;
    }
  const Scalar c =
      std::clamp((m[0][0] + m[1][1] + m[2][2] - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  const Eigen::Matrix<Scalar, 3, 1> axis(m[2][1] - m[1][2], m[0][2] - m[2][0], m[1][0] - m[0][1]);
  return std::atan2(axis.norm() / Scalar(2), c);
}

struct EstimatedTrajectory {
  std::string sample_id;
  std::vector<std::optional<Extrinsics>> frames; // nullopt: not registered

  /// Non-empty with every frame registered.
  bool successful() const;
};

struct GroundTruthTrajectory {
  std::string sample_id;
  std::vector<Extrinsics> frames;
};

struct TrajectoryEvalReport {
  std::optional<double> rot_err;   // radians
  std::optional<double> trans_err; // unit-normalized translations
  double success_rate = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_success = 0;
  std::vector<std::string> warnings;
};

struct SampleErrors {
  double rotation = 0.0;                 // mean over frames 1..n-1
  std::optional<double> translation;     // nullopt when gt never moves
};

/// Errors of one registered trajectory against its ground truth. Both are
/// normalized to their first frame and their stacked translations scaled to
/// unit L2 norm. Throws ValidationError on a length mismatch.
SampleErrors sample_errors(const std::vector<Extrinsics>& gen, const std::vector<Extrinsics>& gt);

/// Sums per-sample errors over successful samples and divides by the success
/// rate. Throws ValidationError when sample counts or ids differ.
TrajectoryEvalReport evaluate(const std::vector<EstimatedTrajectory>& gen,
                              const std::vector<GroundTruthTrajectory>& gt);

struct DropoutPolicy {
  std::map<std::string, double> per_condition_prob;
  double neighbor_view_prob = 0.5;
  std::uint64_t seed = 0;

  static constexpr const char* kNeighborView = "neighbor_view";

  /// first_frame, bev_map and bbox_3d at 0.40; neighbor view at 0.50.
  static DropoutPolicy defaults(std::uint64_t seed = 0);
  void validate() const;
};

/// Uniform [0, 1) value that depends only on (seed, step, condition).
double dropout_uniform(std::uint64_t seed, std::int64_t step, const std::string& condition);

/// Drop decision for every configured condition plus the neighbor view.
std::map<std::string, bool> sample_dropout(const DropoutPolicy& policy, std::int64_t step);

} // namespace camgeo
