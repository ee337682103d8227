#include "camgeo/io/pose_file.hpp"

#include "camgeo/error.hpp"
#include "text_lines.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace camgeo::io {

Rig PoseDocument::rig() const { return Rig(views, neighbors); }

const std::vector<CameraPose>& PoseDocument::trajectory(const std::string& view) const {
  auto it = trajectories.find(view);
  if (it == trajectories.end() || it->second.empty())
    throw ValidationError("no poses for view '" + view + "'");
  return it->second;
}

std::map<std::string, CameraPose> PoseDocument::frame_poses(std::size_t frame) const {
  std::map<std::string, CameraPose> out;
  for (const auto& v : views) {
    const auto& traj = trajectory(v);
    auto it = std::find_if(traj.begin(), traj.end(),
                           [&](const CameraPose& p) { return p.frame_index == frame; });
    if (it == traj.end())
      throw ValidationError("view '" + v + "' has no pose for frame " + std::to_string(frame));
    out.emplace(v, *it);
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

namespace {

enum class Convention { CameraToWorld, WorldToCamera };

Extrinsics make_extrinsics(const Mat3& r, const Vec3& t, Convention c) {
  return c == Convention::CameraToWorld ? Extrinsics(r, t) : Extrinsics::from_world_to_camera(r, t);
}

} // namespace

PoseDocument parse_pose_file(std::istream& in, const std::string& source) {
  PoseDocument doc;
  Convention convention = Convention::CameraToWorld;
  bool seen_pose = false;
  std::set<std::string> neighbor_lines;

  for (const auto& line : tokenize_lines(in)) {
    const LineError err(source, line.number);
    const auto& tok = line.tokens;
    const std::string& kind = tok[0];
    auto expect = [&](std::size_t n) {
      if (tok.size() != n)
        err.fail("'" + kind + "' expects " + std::to_string(n - 1) + " fields, got " +
                 std::to_string(tok.size() - 1));
    };
    auto known_view = [&](const std::string& v) {
      if (!doc.intrinsics.contains(v)) err.fail("view '" + v + "' not declared");
    };
    try {
      if (kind == "convention") {
        expect(2);
        if (seen_pose) err.fail("convention must precede all poses");
        if (tok[1] == "camera_to_world") convention = Convention::CameraToWorld;
        else if (tok[1] == "world_to_camera") convention = Convention::WorldToCamera;
        else err.fail("unknown convention '" + tok[1] + "'");
      } else if (kind == "view") {
        expect(8);
        if (doc.intrinsics.contains(tok[1])) err.fail("view '" + tok[1] + "' declared twice");
        const long long width = parse_int(tok[6], err), height = parse_int(tok[7], err);
        if (width <= 0 || height <= 0 || width > (1 << 20) || height > (1 << 20))
          err.fail("image size out of range");
        doc.intrinsics.emplace(tok[1], Intrinsics::from_pinhole(
                                           parse_double(tok[2], err), parse_double(tok[3], err),
                                           parse_double(tok[4], err), parse_double(tok[5], err),
                                           static_cast<int>(width), static_cast<int>(height)));
        doc.views.push_back(tok[1]);
      } else if (kind == "neighbors") {
        expect(4);
        known_view(tok[1]);
        if (!neighbor_lines.insert(tok[1]).second) err.fail("neighbors of '" + tok[1] + "' declared twice");
        NeighborPair pair;
        if (tok[2] != "-") pair.left = tok[2];
        if (tok[3] != "-") pair.right = tok[3];
        doc.neighbors[tok[1]] = pair;
      } else if (kind == "pose" || kind == "poseq") {
        expect(kind == "pose" ? 15 : 10);
        known_view(tok[1]);
        const long long frame = parse_int(tok[2], err);
        if (frame < 0) err.fail("frame index must be non-negative");
        Mat3 r;
        Vec3 t;
        std::size_t at = 3;
        if (kind == "pose") {
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = parse_double(tok[at++], err);
        } else {
          const double qw = parse_double(tok[3], err), qx = parse_double(tok[4], err),
                       qy = parse_double(tok[5], err), qz = parse_double(tok[6], err);
          Eigen::Quaterniond q(qw, qx, qy, qz);
          if (q.norm() < 1e-12) err.fail("zero quaternion");
          r = q.normalized().toRotationMatrix();
          at = 7;
        }
        for (int i = 0; i < 3; ++i) t(i) = parse_double(tok[at++], err);
        auto& traj = doc.trajectories[tok[1]];
        for (const auto& p : traj)
          if (p.frame_index == static_cast<std::size_t>(frame))
            err.fail("duplicate frame " + std::to_string(frame) + " for view '" + tok[1] + "'");
        traj.push_back(CameraPose{doc.intrinsics.at(tok[1]), make_extrinsics(r, t, convention),
                                  static_cast<std::size_t>(frame), tok[1]});
        seen_pose = true;
      } else {
        err.fail("unknown record '" + kind + "'");
      }
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind(err.prefix(), 0) == 0) throw;
      err.fail(what);
    }
  }
  for (auto& [view, traj] : doc.trajectories)
    std::sort(traj.begin(), traj.end(),
              [](const CameraPose& a, const CameraPose& b) { return a.frame_index < b.frame_index; });
  try {
    (void)doc.rig();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return doc;
}

PoseDocument read_pose_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open pose file '" + path.string() + "'");
  return parse_pose_file(in, path.string());
}

std::string format_pose_file(const PoseDocument& doc) {
  std::ostringstream out;
  out << "convention camera_to_world\n";
  for (const auto& v : doc.views) {
    const auto& k = doc.intrinsics.at(v);
    out << "view " << v << ' ' << format_double(k.fx()) << ' ' << format_double(k.fy()) << ' '
        << format_double(k.cx()) << ' ' << format_double(k.cy()) << ' ' << k.width() << ' '
        << k.height() << '\n';
  }
  for (const auto& v : doc.views) {
    auto it = doc.neighbors.find(v);
    if (it == doc.neighbors.end()) continue;
    out << "neighbors " << v << ' ' << it->second.left.value_or("-") << ' '
        << it->second.right.value_or("-") << '\n';
  }
  for (const auto& v : doc.views) {
    auto it = doc.trajectories.find(v);
    if (it == doc.trajectories.end()) continue;
    for (const auto& p : it->second) {
      out << "pose " << v << ' ' << p.frame_index;
      const Mat3& r = p.extrinsics.rotation();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << ' ' << format_double(r(i, j));
      for (int i = 0; i < 3; ++i) out << ' ' << format_double(p.extrinsics.translation()(i));
      out << '\n';
    }
  }
  return out.str();
}

} // namespace camgeo::io
