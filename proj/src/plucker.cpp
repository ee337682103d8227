#include "camgeo/plucker.hpp"

#include "camgeo/error.hpp"

#include <string>

namespace camgeo {

PluckerTensor::PluckerTensor(int h, int w, std::vector<PluckerColumns> frames,
                             std::vector<CameraPose> poses)
    : h_(h), w_(w), frames_(std::move(frames)), poses_(std::move(poses)) {
  if (h <= 0 || w <= 0) throw ValidationError("plucker tensor: grid must be non-empty");
  if (frames_.empty()) throw ValidationError("plucker tensor: no frames");
  for (const auto& f : frames_)
    if (f.cols() != static_cast<Eigen::Index>(h) * w)
      throw ValidationError("plucker tensor: frame size does not match grid");
}

std::vector<std::size_t> PluckerTensor::shape() const {
  return {frames_.size(), 6, static_cast<std::size_t>(h_), static_cast<std::size_t>(w_)};
}

std::vector<double> PluckerTensor::flatten() const {
  const std::size_t hw = static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_);
  std::vector<double> out;
  out.reserve(frames_.size() * 6 * hw);
  for (const auto& f : frames_)
    for (int c = 0; c < 6; ++c)
      for (std::size_t q = 0; q < hw; ++q) out.push_back(f(c, static_cast<Eigen::Index>(q)));
  return out;
}

ResolutionPyramid::ResolutionPyramid(std::vector<std::pair<int, int>> levels)
    : levels_(std::move(levels)) {
  if (levels_.empty()) throw ValidationError("pyramid: no levels");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto [h, w] = levels_[i];
    if (h < 1 || w < 1) throw ValidationError("pyramid: level dimensions must be >= 1");
    if (i == 0) continue;
    const auto [ph, pw] = levels_[i - 1];
    if (h != ph / 2 || w != pw / 2)
      throw ValidationError("pyramid: level " + std::to_string(i) +
                            " is not the integer half of the previous level");
  }
}

ResolutionPyramid ResolutionPyramid::halving(int h, int w, int count) {
  std::vector<std::pair<int, int>> levels;
  for (int i = 0; i < count; ++i) {
    levels.emplace_back(h, w);
    h /= 2;
    w /= 2;
  }
  return ResolutionPyramid(std::move(levels));
}

Vec3 pixel_ray(const CameraPose& pose, double x, double y) {
  const Vec3 cam = pose.intrinsics.k_inverse() * Vec3(x, y, 1.0);
  return (pose.extrinsics.rotation() * cam).normalized();
}

namespace {

PluckerColumns grid_columns(const CameraPose& pose, int h, int w) {
  PluckerColumns cols(6, static_cast<Eigen::Index>(h) * w);
  const double sx = static_cast<double>(pose.intrinsics.width()) / w;
  const double sy = static_cast<double>(pose.intrinsics.height()) / h;
  const Vec3& center = pose.extrinsics.center();
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Vec3 d = pixel_ray(pose, (u + 0.5) * sx, (v + 0.5) * sy);
      auto col = cols.col(static_cast<Eigen::Index>(v) * w + u);
      col.head<3>() = d;
      col.tail<3>() = center.cross(d);
    }
  }
  return cols;
}

} // namespace

PluckerTensor plucker_grid(const CameraPose& pose, int h, int w) {
  if (h < 1 || w < 1) throw ValidationError("plucker: grid must be at least 1x1");
  return PluckerTensor(h, w, {grid_columns(pose, h, w)}, {pose});
}

PluckerTensor plucker_trajectory(const std::vector<CameraPose>& poses, int h, int w,
                                 bool normalize_to_first) {
  if (poses.empty()) throw ValidationError("plucker: empty trajectory");
  if (h < 1 || w < 1) throw ValidationError("plucker: grid must be at least 1x1");
  for (const auto& p : poses)
    if (p.view_id != poses.front().view_id)
      throw ValidationError("plucker: trajectory mixes views '" + poses.front().view_id +
                            "' and '" + p.view_id + "'");

  std::vector<CameraPose> used = poses;
  if (normalize_to_first) {
    std::vector<Extrinsics> ext;
    ext.reserve(poses.size());
    for (const auto& p : poses) ext.push_back(p.extrinsics);
    const auto rel = normalize_trajectory(ext);
    for (std::size_t i = 0; i < used.size(); ++i) used[i].extrinsics = rel[i];
  }

  std::vector<PluckerColumns> frames;
  frames.reserve(used.size());
  for (const auto& p : used) frames.push_back(grid_columns(p, h, w));
  return PluckerTensor(h, w, std::move(frames), std::move(used));
}

std::vector<PluckerTensor> downsample_pyramid(const PluckerTensor& t,
                                              const ResolutionPyramid& levels) {
  std::vector<PluckerTensor> out;
  out.reserve(levels.levels().size());
  for (const auto& [h, w] : levels.levels()) {
    if (h > t.height() || w > t.width())
      throw ValidationError("pyramid: level " + std::to_string(h) + "x" + std::to_string(w) +
                            " exceeds source " + std::to_string(t.height()) + "x" +
                            std::to_string(t.width()));
    std::vector<PluckerColumns> frames;
    frames.reserve(t.poses().size());
    for (const auto& p : t.poses()) frames.push_back(grid_columns(p, h, w));
    out.emplace_back(h, w, std::move(frames), t.poses());
  }
  return out;
}

} // namespace camgeo
