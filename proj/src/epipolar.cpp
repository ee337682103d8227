#include "camgeo/epipolar.hpp"

#include "camgeo/error.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace camgeo {

FundamentalMatrix::FundamentalMatrix(const Mat3& f, std::string source_view,
                                     std::string target_view, Eigen::Vector2i source_size,
                                     Eigen::Vector2i target_size)
    : source_view_(std::move(source_view)),
      target_view_(std::move(target_view)),
      source_size_(source_size),
      target_size_(target_size) {
  const double norm = f.norm();
  if (!std::isfinite(norm) || norm == 0.0)
    throw GeometryError("fundamental matrix: zero or non-finite matrix");
  f_ = f / norm;
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Mat3>(f_).singularValues();
  if (sv(2) > 1e-9 * sv(0)) throw GeometryError("fundamental matrix: not rank 2");
}

FundamentalMatrix fundamental_matrix(const CameraPose& local, const CameraPose& neighbor,
                                     bool paper_literal) {
  const Extrinsics rel = relative_pose(local.extrinsics, neighbor.extrinsics);
  const Mat3& r = rel.rotation();
  const Vec3& t = rel.translation();
  if (t.norm() <= 1e-12)
    throw GeometryError("degenerate: pure rotation, fundamental matrix undefined (views '" +
                        local.view_id + "' and '" + neighbor.view_id + "')");

  const Mat3& kl_inv = local.intrinsics.k_inverse();
  const Mat3& kn_inv = neighbor.intrinsics.k_inverse();
  Mat3 f;
  if (paper_literal) {
    f = kn_inv * r * skew(t) * kl_inv;
  } else {
    // x_N = R x_L + t  =>  x_N^T [t]x R x_L = 0; transpose to put x_L on the left.
    f = kl_inv.transpose() * r.transpose() * skew(t).transpose() * kn_inv;
  }
  return {f, neighbor.view_id, local.view_id,
          {neighbor.intrinsics.width(), neighbor.intrinsics.height()},
          {local.intrinsics.width(), local.intrinsics.height()}};
}

Eigen::Matrix<double, 3, Eigen::Dynamic> pixel_centers(int h, int w,
                                                       const Eigen::Vector2i& native) {
  Eigen::Matrix<double, 3, Eigen::Dynamic> x(3, static_cast<Eigen::Index>(h) * w);
  const double sx = static_cast<double>(native(0)) / w;
  const double sy = static_cast<double>(native(1)) / h;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      x.col(static_cast<Eigen::Index>(v) * w + u) << (u + 0.5) * sx, (v + 0.5) * sy, 1.0;
  return x;
}

namespace {

void fill_block(const FundamentalMatrix& f, const Eigen::Matrix<double, 3, Eigen::Dynamic>& xq,
                int h, int w, ResidualKind kind, Eigen::Ref<RowMajorMatrixXd> out) {
  const auto xk = pixel_centers(h, w, f.source_size());
  const Mat3& fm = f.matrix();
  // lines(:, k) = F x_k is the epipolar line of key k in the local image.
  const Eigen::Matrix<double, 3, Eigen::Dynamic> lines = fm * xk;
  const Eigen::Matrix<double, 3, Eigen::Dynamic> back = fm.transpose() * xq;
  for (Eigen::Index q = 0; q < xq.cols(); ++q) {
    for (Eigen::Index k = 0; k < xk.cols(); ++k) {
      const double alg = xq.col(q).dot(lines.col(k));
      if (kind == ResidualKind::Algebraic) {
        out(q, k) = std::abs(alg);
      } else {
        const double den = lines(0, k) * lines(0, k) + lines(1, k) * lines(1, k) +
                           back(0, q) * back(0, q) + back(1, q) * back(1, q);
        out(q, k) = den > 0.0 ? std::abs(alg) / std::sqrt(den) : 0.0;
      }
    }
  }
}

} // namespace

EpipolarResidualField residual_field(const FundamentalMatrix& left, const FundamentalMatrix& right,
                                     int h, int w, ResidualKind kind) {
  if (h < 1 || w < 1) throw ValidationError("residual field: grid must be at least 1x1");
  if (left.target_view() != right.target_view())
    throw ValidationError("residual field: left maps to '" + left.target_view() +
                          "' but right maps to '" + right.target_view() + "'");
  if (left.target_size() != right.target_size())
    throw ValidationError("residual field: target image sizes differ");

  const Eigen::Index hw = static_cast<Eigen::Index>(h) * w;
  EpipolarResidualField field{h, w, RowMajorMatrixXd(hw, 2 * hw)};
  const auto xq = pixel_centers(h, w, left.target_size());
  fill_block(left, xq, h, w, kind, field.values.leftCols(hw));
  fill_block(right, xq, h, w, kind, field.values.rightCols(hw));
  return field;
}

std::size_t EpipolarMask::row_popcount(Eigen::Index row) const {
  return static_cast<std::size_t>(bits.row(row).count());
}

std::size_t row_budget(double ratio, std::size_t keys) {
  const double exact = ratio * static_cast<double>(keys);
  return std::min(keys, static_cast<std::size_t>(std::floor(exact + 1e-9)));
}

namespace {

// Sets the `budget` smallest entries of `values` (ordered by value, then
// index) in `bits`.
template <typename Values, typename Bits>
void select_smallest(const Values& values, std::size_t budget, Bits&& bits) {
  const auto n = static_cast<std::size_t>(values.size());
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    const double va = values(a), vb = values(b);
    return va < vb || (va == vb && a < b);
  };
  if (budget < n)
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(budget), idx.end(),
                     less);
  for (std::size_t i = 0; i < budget; ++i) bits(idx[i]) = true;
}

} // namespace

EpipolarMask epipolar_mask(const EpipolarResidualField& field, double ratio, TauMode mode) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw ValidationError("epipolar mask: ratio must lie in (0, 1]");
  if (!field.values.allFinite()) throw GeometryError("epipolar mask: non-finite residuals");

  EpipolarMask mask{field.h, field.w, ratio, mode,
                    RowMajorMatrixXb::Zero(field.values.rows(), field.values.cols())};
  if (mode == TauMode::PerRow) {
    const std::size_t budget = row_budget(ratio, static_cast<std::size_t>(field.values.cols()));
    for (Eigen::Index q = 0; q < field.values.rows(); ++q) {
      auto row = field.values.row(q);
      auto out = mask.bits.row(q);
      select_smallest(row, budget, [&](Eigen::Index k) -> bool& { return out(k); });
    }
  } else {
    const auto flat = field.values.reshaped<Eigen::RowMajor>();
    auto out = mask.bits.reshaped<Eigen::RowMajor>();
    const std::size_t budget = row_budget(ratio, static_cast<std::size_t>(flat.size()));
    select_smallest(flat, budget, [&](Eigen::Index k) -> bool& { return out(k); });
  }
  return mask;
}

namespace {

const CameraPose& pose_for(const std::map<std::string, CameraPose>& poses, const std::string& v) {
  auto it = poses.find(v);
  if (it == poses.end()) throw ValidationError("missing pose for view '" + v + "'");
  return it->second;
}

EpipolarMask mask_from_neighbors(const CameraPose& local, const CameraPose& left,
                                 const CameraPose& right, int h, int w, double ratio,
                                 const EpipolarOptions& options) {
  const auto f_left = fundamental_matrix(local, left, options.paper_literal_f);
  const auto f_right = fundamental_matrix(local, right, options.paper_literal_f);
  return epipolar_mask(residual_field(f_left, f_right, h, w, options.residual), ratio,
                       options.tau);
}

} // namespace

EpipolarMask view_mask(const Rig& rig, const std::map<std::string, CameraPose>& poses,
                       const std::string& view, int h, int w, double ratio,
                       const EpipolarOptions& options) {
  if (!rig.contains(view)) throw ValidationError("unknown view '" + view + "'");
  const NeighborPair n = rig.neighbors_of(view);
  if (!n.left || !n.right)
    throw ValidationError("no neighbors: view '" + view + "' lacks a left or right neighbor");
  return mask_from_neighbors(pose_for(poses, view), pose_for(poses, *n.left),
                             pose_for(poses, *n.right), h, w, ratio, options);
}

RigMasks rig_masks(const Rig& rig, const std::map<std::string, CameraPose>& poses, int h, int w,
                   double ratio, const EpipolarOptions& options) {
  for (const auto& v : rig.views()) pose_for(poses, v);
  RigMasks out;
  for (const auto& v : rig.views()) {
    const NeighborPair n = rig.neighbors_of(v);
    if (!n.left || !n.right) {
      out.warnings.push_back("view '" + v + "' lacks a " + (n.left ? "right" : "left") +
                             " neighbor; no mask");
      continue;
    }
    out.masks.emplace(v, mask_from_neighbors(poses.at(v), poses.at(*n.left), poses.at(*n.right),
                                             h, w, ratio, options));
  }
  return out;
}

} // namespace camgeo
