#include "camgeo/io/trajectory_file.hpp"

#include "camgeo/error.hpp"
#include "camgeo/io/pose_file.hpp"
#include "text_lines.hpp"

#include <fstream>
#include <sstream>

namespace camgeo::io {

std::vector<EstimatedTrajectory> parse_trajectory_file(std::istream& in, const std::string& source) {
  std::vector<EstimatedTrajectory> samples;
  bool world_to_camera = false;
  for (const auto& line : tokenize_lines(in)) {
    const LineError err(source, line.number);
    const auto& tok = line.tokens;
    try {
      if (tok[0] == "convention") {
        if (tok.size() != 2) err.fail("'convention' expects 1 field");
        if (!samples.empty()) err.fail("convention must precede all samples");
        if (tok[1] == "camera_to_world") world_to_camera = false;
        else if (tok[1] == "world_to_camera") world_to_camera = true;
        else err.fail("unknown convention '" + tok[1] + "'");
      } else if (tok[0] == "sample") {
        if (tok.size() != 2) err.fail("'sample' expects 1 field");
        samples.push_back({tok[1], {}});
      } else if (tok[0] == "frame") {
        if (samples.empty()) err.fail("frame outside of a sample");
        auto& frames = samples.back().frames;
        if (tok.size() < 2) err.fail("'frame' expects an index");
        if (parse_int(tok[1], err) != static_cast<long long>(frames.size()))
          err.fail("expected frame " + std::to_string(frames.size()));
        if (tok.size() == 3 && tok[2] == "missing") {
          frames.emplace_back(std::nullopt);
          continue;
        }
        if (tok.size() != 14) err.fail("'frame' expects 12 pose numbers or 'missing'");
        Mat3 r;
        Vec3 t;
        std::size_t at = 2;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) r(i, j) = parse_double(tok[at++], err);
        for (int i = 0; i < 3; ++i) t(i) = parse_double(tok[at++], err);
        frames.emplace_back(world_to_camera ? Extrinsics::from_world_to_camera(r, t)
                                            : Extrinsics(r, t));
      } else {
        err.fail("unknown record '" + tok[0] + "'");
      }
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind(err.prefix(), 0) == 0) throw;
      err.fail(what);
    }
  }
  return samples;
}

std::vector<EstimatedTrajectory> read_trajectory_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trajectory file '" + path.string() + "'");
  return parse_trajectory_file(in, path.string());
}

std::vector<GroundTruthTrajectory> to_ground_truth(const std::vector<EstimatedTrajectory>& t) {
  std::vector<GroundTruthTrajectory> out;
  out.reserve(t.size());
  for (const auto& s : t) {
    if (!s.successful())
      throw ValidationError("ground truth sample '" + s.sample_id + "' has missing frames");
    GroundTruthTrajectory g{s.sample_id, {}};
    for (const auto& f : s.frames) g.frames.push_back(*f);
    out.push_back(std::move(g));
  }
  return out;
}

std::string format_trajectory_file(const std::vector<EstimatedTrajectory>& samples) {
  std::ostringstream out;
  out << "convention camera_to_world\n";
  for (const auto& s : samples) {
    out << "sample " << s.sample_id << '\n';
    for (std::size_t k = 0; k < s.frames.size(); ++k) {
      out << "frame " << k;
      if (!s.frames[k]) {
        out << " missing\n";
        continue;
      }
      const Mat3& r = s.frames[k]->rotation();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out << ' ' << format_double(r(i, j));
      for (int i = 0; i < 3; ++i) out << ' ' << format_double(s.frames[k]->translation()(i));
      out << '\n';
    }
  }
  return out.str();
}

} // namespace camgeo::io
