#pragma once

// Fundamental matrices between rig neighbors and the epipolar cross-attention
// masks derived from them.
//
// Key layout of the (h*w) x (2*h*w) residual field and mask: key k < h*w is
// pixel k of the left neighbor, key k >= h*w is pixel k - h*w of the right
// neighbor. Pixels are indexed v * w + u in both query and key space.

#include "camgeo/camera_model.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace camgeo {

class FundamentalMatrix {
public:
  /// Normalizes `f` to unit Frobenius norm; throws GeometryError if f is zero
  /// or not rank 2 (sigma_min > 1e-9 * sigma_max).
  FundamentalMatrix(const Mat3& f, std::string source_view, std::string target_view,
                    Eigen::Vector2i source_size, Eigen::Vector2i target_size);

  const Mat3& matrix() const { return f_; }
  const std::string& source_view() const { return source_view_; }
  const std::string& target_view() const { return target_view_; }
  /// Native (width, height) of the neighbor (source) and local (target) views.
  const Eigen::Vector2i& source_size() const { return source_size_; }
  const Eigen::Vector2i& target_size() const { return target_size_; }

  /// |x_target^T F x_source| for homogeneous native pixel coordinates.
  double algebraic_residual(const Vec3& x_target, const Vec3& x_source) const {
    return std::abs(x_target.dot(f_ * x_source));
  }

private:
  Mat3 f_;
  std::string source_view_;
  std::string target_view_;
  Eigen::Vector2i source_size_;
  Eigen::Vector2i target_size_;
};

/// Maps neighbor pixels to epipolar lines in the local view:
/// x_local^T F x_neighbor == 0 for projections of one 3D point.
///
/// The default form is K_L^-T R^T [t]_x^T K_N^-1 with (R, t) =
/// relative_pose(local, neighbor). `paper_literal` selects
/// K_N^-1 R [t]_x K_L^-1 instead, which does not satisfy the constraint for
/// general poses and exists only for compatibility with that formula.
///
/// Throws GeometryError when the camera centers coincide (|t| <= 1e-12).
FundamentalMatrix fundamental_matrix(const CameraPose& local, const CameraPose& neighbor,
                                     bool paper_literal = false);

enum class ResidualKind { Algebraic, Sampson };
enum class TauMode { PerRow, Global };

using RowMajorMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorMatrixXb = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EpipolarResidualField {
  int h = 0;
  int w = 0;
  RowMajorMatrixXd values; // (h*w) x (2*h*w), all >= 0
};

/// Homogeneous native coordinates of the pixel centers of an h x w grid laid
/// over a native (width, height) image; column v * w + u.
Eigen::Matrix<double, 3, Eigen::Dynamic> pixel_centers(int h, int w, const Eigen::Vector2i& native);

/// Dense residuals between every local query pixel and every key pixel of
/// the concatenated [left | right] neighbor grids. Throws ValidationError when
/// the two matrices disagree on the target view or its native size.
EpipolarResidualField residual_field(const FundamentalMatrix& left, const FundamentalMatrix& right,
                                     int h, int w,
                                     ResidualKind kind = ResidualKind::Algebraic);

struct EpipolarMask {
  int h = 0;
  int w = 0;
  double ratio = 0.0;
  TauMode mode = TauMode::PerRow;
  RowMajorMatrixXb bits; // (h*w) x (2*h*w)

  std::size_t row_popcount(Eigen::Index row) const;
};

/// Number of keys kept per row: floor(ratio * keys), guarded against binary
/// round-off just below an integer.
std::size_t row_budget(double ratio, std::size_t keys);

/// Keeps the lowest-residual fraction `ratio` of keys, per query row
/// (default) or over the whole field. Ties go to the smaller key index.
/// Throws ValidationError unless 0 < ratio <= 1.
EpipolarMask epipolar_mask(const EpipolarResidualField& field, double ratio,
                           TauMode mode = TauMode::PerRow);

struct EpipolarOptions {
  bool paper_literal_f = false;
  ResidualKind residual = ResidualKind::Algebraic;
  TauMode tau = TauMode::PerRow;
};

/// Mask for one view from its two rig neighbors. Throws ValidationError("no
/// neighbors ...") if the view lacks either neighbor or a pose is missing.
EpipolarMask view_mask(const Rig& rig, const std::map<std::string, CameraPose>& poses,
                       const std::string& view, int h, int w, double ratio,
                       const EpipolarOptions& options = {});

struct RigMasks {
  std::map<std::string, EpipolarMask> masks;
  std::vector<std::string> warnings;
};

/// One mask per view that has both neighbors; other views are skipped with a
/// warning. Throws ValidationError naming the first rig view without a pose.
RigMasks rig_masks(const Rig& rig, const std::map<std::string, CameraPose>& poses, int h, int w,
                   double ratio, const EpipolarOptions& options = {});

} // namespace camgeo
