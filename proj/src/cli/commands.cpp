#include "camgeo/cli/commands.hpp"

#include "camgeo/error.hpp"
#include "camgeo/io/atomic_write.hpp"
#include "camgeo/io/mask_file.hpp"
#include "camgeo/io/pose_file.hpp"
#include "camgeo/io/tensor_file.hpp"
#include "camgeo/io/trajectory_file.hpp"
#include "camgeo/log.hpp"
#include "camgeo/plucker.hpp"
#include "camgeo/pose_metrics.hpp"

#include <json.hpp>

#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace camgeo::cli {

using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const GeometryError*>(&e) != nullptr) return kGeometry;
  if (dynamic_cast<const ValidationError*>(&e) != nullptr) return kValidation;
  return kValidation;
}

namespace {

void emit(const std::string& text, const std::optional<std::filesystem::path>& out,
          std::ostream& stdout_) {
  if (out)
    io::atomic_write(*out, text);
  else
    stdout_ << text;
}

json matrix_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

const CameraPose& pose_at(const std::map<std::string, CameraPose>& poses, const std::string& v) {
  auto it = poses.find(v);
  if (it == poses.end()) throw ValidationError("unknown view '" + v + "'");
  return it->second;
}

void require_grid(int h, int w) {
  if (h < 1 || w < 1) throw ValidationError("grid height and width must be >= 1");
}

} // namespace

void cmd_plucker(const PluckerArgs& args) {
  require_grid(args.h, args.w);
  const auto doc = io::read_pose_file(args.pose_file);
  const auto tensor =
      plucker_trajectory(doc.trajectory(args.view), args.h, args.w, args.normalize_first_frame);
  std::vector<std::uint64_t> dims;
  for (auto d : tensor.shape()) dims.push_back(d);
  const auto flat = tensor.flatten();
  io::write_tensor_file(args.out, io::make_tensor(std::move(dims), flat));
  log::info("wrote plucker tensor for view '" + args.view + "' to " + args.out.string());
}

void cmd_fundamental(const FundamentalArgs& args, std::ostream& stdout_) {
  const auto poses = io::read_pose_file(args.pose_file).frame_poses(args.frame);
  const auto f = fundamental_matrix(pose_at(poses, args.local), pose_at(poses, args.neighbor),
                                    args.paper_literal_f);
  json doc{{"source_view", f.source_view()},
           {"target_view", f.target_view()},
           {"frame", args.frame},
           {"paper_literal", args.paper_literal_f},
           {"F", matrix_json(f.matrix())}};
  emit(doc.dump(2) + "\n", args.out, stdout_);
}

void cmd_mask(const MaskArgs& args) {
  require_grid(args.h, args.w);
  const auto doc = io::read_pose_file(args.pose_file);
  const auto mask =
      view_mask(doc.rig(), doc.frame_poses(args.frame), args.view, args.h, args.w, args.ratio,
                args.options);
  io::write_mask_file(args.out, mask);
  if (args.pgm) io::atomic_write(*args.pgm, io::encode_mask_pgm(mask));
  log::info("wrote " + std::to_string(mask.bits.rows()) + "x" +
            std::to_string(mask.bits.cols()) + " mask to " + args.out.string());
}

void cmd_relpose(const RelposeArgs& args, std::ostream& stdout_) {
  const auto poses = io::read_pose_file(args.pose_file).frame_poses(args.frame);
  const auto rel = relative_pose(pose_at(poses, args.local).extrinsics,
                                 pose_at(poses, args.neighbor).extrinsics);
  const Vec3& t = rel.translation();
  json doc{{"local", args.local},
           {"neighbor", args.neighbor},
           {"frame", args.frame},
           {"R", matrix_json(rel.rotation())},
           {"t", {t(0), t(1), t(2)}}};
  emit(doc.dump(2) + "\n", args.out, stdout_);
}

void cmd_eval(const EvalArgs& args, std::ostream& stdout_) {
  const auto gen = io::read_trajectory_file(args.gen_file);
  const auto gt = io::to_ground_truth(io::read_trajectory_file(args.gt_file));
  const auto report = evaluate(gen, gt);
  for (const auto& w : report.warnings) log::warn(w);

  auto value = [](const std::optional<double>& v) {
    return v ? io::format_double(*v) : std::string("undefined");
  };
  auto degrees = [](const std::optional<double>& v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return *v * 180.0 / std::numbers::pi;
  };
  std::ostringstream text;
  text << "n_samples=" << report.n_samples << '\n'
       << "n_success=" << report.n_success << '\n'
       << "success_rate=" << io::format_double(report.success_rate) << '\n'
       << "rot_err=" << value(report.rot_err) << '\n'
       << "rot_err_deg=" << value(degrees(report.rot_err)) << '\n'
       << "trans_err=" << value(report.trans_err) << '\n';
  stdout_ << text.str();

  if (args.json_out) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json doc{{"n_samples", report.n_samples},
             {"n_success", report.n_success},
             {"success_rate", report.success_rate},
             {"rot_err", opt(report.rot_err)},
             {"rot_err_deg", opt(degrees(report.rot_err))},
             {"trans_err", opt(report.trans_err)},
             {"warnings", report.warnings}};
    io::atomic_write(*args.json_out, doc.dump(2) + "\n");
  }
}

void cmd_dropout_schedule(const DropoutArgs& args, std::ostream& stdout_) {
  if (args.steps < 0) throw ValidationError("dropout-schedule: steps must be non-negative");
  DropoutPolicy policy = DropoutPolicy::defaults(args.seed);
  for (const auto& [name, p] : args.overrides) {
    if (name == DropoutPolicy::kNeighborView)
      policy.neighbor_view_prob = p;
    else
      policy.per_condition_prob[name] = p;
  }
  policy.validate();

  std::ostringstream out;
  if (args.summary) {
    std::map<std::string, std::int64_t> dropped;
    for (std::int64_t s = args.start; s < args.start + args.steps; ++s)
      for (const auto& [name, d] : sample_dropout(policy, s)) dropped[name] += d ? 1 : 0;
    out << "steps=" << args.steps << '\n';
    for (const auto& [name, count] : dropped) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f",
                    args.steps > 0 ? static_cast<double>(count) / static_cast<double>(args.steps)
                                   : 0.0);
      out << name << '=' << buf << '\n';
    }
  } else {
    bool header = false;
    for (std::int64_t s = args.start; s < args.start + args.steps; ++s) {
      const auto row = sample_dropout(policy, s);
      if (!header) {
        out << "step";
        for (const auto& [name, d] : row) out << ',' << name;
        out << '\n';
        header = true;
      }
      out << s;
      for (const auto& [name, d] : row) out << ',' << (d ? 1 : 0);
      out << '\n';
    }
  }
  emit(out.str(), args.out, stdout_);
}

} // namespace camgeo::cli
