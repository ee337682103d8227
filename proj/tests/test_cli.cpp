#include "camgeo/epipolar.hpp"
#include "camgeo/io/atomic_write.hpp"
#include "camgeo/io/mask_file.hpp"
#include "camgeo/io/pose_file.hpp"
#include "camgeo/io/tensor_file.hpp"
#include "camgeo/plucker.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>

namespace camgeo {
namespace {

using testing::fixture;
using testing::run_cli;
using testing::slurp;
using testing::TempDir;

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

TEST(Cli, HelpAndUsageErrors) {
  TempDir dir("cli_usage");
  EXPECT_EQ(run_cli("--help", dir.path()).exit_code, 0);
  EXPECT_EQ(run_cli("", dir.path()).exit_code, 1);
  EXPECT_EQ(run_cli("frobnicate", dir.path()).exit_code, 1);
  EXPECT_EQ(run_cli("plucker " + q(fixture("dolly.poses")) + " --view cam -H 4", dir.path()).exit_code,
            1);
  EXPECT_EQ(run_cli("mask " + q(fixture("stereo_pair.poses")) +
                        " --view left -H 2 -W 2 -o x --tau-mode sideways",
                    dir.path())
                .exit_code,
            1);
  EXPECT_EQ(run_cli("eval " + q(dir / "missing.traj") + " " + q(dir / "missing.traj"), dir.path())
                .exit_code,
            1);
}

TEST(Cli, PluckerWritesTensorMatchingLibrary) {
  TempDir dir("cli_plucker");
  const auto out = dir / "p.bin";
  const auto r = run_cli("plucker " + q(fixture("dolly.poses")) + " --view cam -H 4 -W 6 -o " + q(out),
                         dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto t = io::read_tensor_file(out);
  EXPECT_EQ(t.dims, (std::vector<std::uint64_t>{3, 6, 4, 6}));
  const auto doc = io::read_pose_file(fixture("dolly.poses"));
  const auto expected = plucker_trajectory(doc.trajectory("cam"), 4, 6, true).flatten();
  EXPECT_EQ(t, io::make_tensor(t.dims, expected));
}

TEST(Cli, PluckerWithoutNormalization) {
  // CAM_FRONT_LEFT starts rotated, so normalization changes the output.
  TempDir dir("cli_plucker_raw");
  const auto a = dir / "a.bin", b = dir / "b.bin";
  const auto rig = q(fixture("rig_nuscenes_like.poses"));
  ASSERT_EQ(run_cli("plucker " + rig + " --view CAM_FRONT_LEFT -H 3 -W 3 --no-normalize-first-frame -o " +
                        q(a),
                    dir.path())
                .exit_code,
            0);
  ASSERT_EQ(run_cli("plucker " + rig + " --view CAM_FRONT_LEFT -H 3 -W 3 -o " + q(b), dir.path())
                .exit_code,
            0);
  EXPECT_NE(slurp(a), slurp(b));
  const auto doc = io::read_pose_file(fixture("rig_nuscenes_like.poses"));
  const auto t = io::read_tensor_file(a);
  const auto expected = plucker_trajectory(doc.trajectory("CAM_FRONT_LEFT"), 3, 3, false).flatten();
  EXPECT_EQ(t, io::make_tensor(t.dims, expected));
}

TEST(Cli, FundamentalJson) {
  TempDir dir("cli_fund");
  const auto r = run_cli("fundamental " + q(fixture("rig_nuscenes_like.poses")) +
                             " --local CAM_FRONT --neighbor CAM_FRONT_LEFT --frame 1",
                         dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["source_view"], "CAM_FRONT_LEFT");
  EXPECT_EQ(j["target_view"], "CAM_FRONT");
  EXPECT_EQ(j["frame"], 1);
  EXPECT_EQ(j["paper_literal"], false);
  const auto doc = io::read_pose_file(fixture("rig_nuscenes_like.poses"));
  const auto poses = doc.frame_poses(1);
  const Mat3 f = fundamental_matrix(poses.at("CAM_FRONT"), poses.at("CAM_FRONT_LEFT")).matrix();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(j["F"][i][k].get<double>(), f(i, k));

  const auto lit = run_cli("fundamental " + q(fixture("rig_nuscenes_like.poses")) +
                               " --local CAM_FRONT --neighbor CAM_FRONT_LEFT --paper-literal-F",
                           dir.path());
  ASSERT_EQ(lit.exit_code, 0);
  EXPECT_EQ(nlohmann::json::parse(lit.out)["paper_literal"], true);
}

TEST(Cli, FundamentalDegenerateIsGeometryError) {
  TempDir dir("cli_degenerate");
  const auto poses = dir / "same.poses";
  io::atomic_write(poses,
                   "view a 10 10 5 5 10 10\nview b 10 10 5 5 10 10\n"
                   "pose a 0 1 0 0 0 1 0 0 0 1 1 2 3\n"
                   "poseq b 0 0 1 0 0 1 2 3\n");
  const auto r = run_cli("fundamental " + q(poses) + " --local a --neighbor b", dir.path());
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.err.find("degenerate: pure rotation"), std::string::npos);
}

TEST(Cli, MaskMatchesLibraryAndWritesPgm) {
  TempDir dir("cli_mask");
  const auto out = dir / "m.bin", pgm = dir / "m.pgm";
  const auto r = run_cli("mask " + q(fixture("rig_nuscenes_like.poses")) +
                             " --view CAM_FRONT -H 4 -W 8 --ratio 0.25 -o " + q(out) + " --pgm " +
                             q(pgm),
                         dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto m = io::read_mask_file(out);
  const auto doc = io::read_pose_file(fixture("rig_nuscenes_like.poses"));
  const auto expected = view_mask(doc.rig(), doc.frame_poses(0), "CAM_FRONT", 4, 8, 0.25);
  EXPECT_TRUE(m.bits == expected.bits);
  EXPECT_EQ(slurp(pgm), io::encode_mask_pgm(expected));
  for (Eigen::Index row = 0; row < 32; ++row) EXPECT_EQ(m.row_popcount(row), 16u);
}

TEST(Cli, MaskOptions) {
  TempDir dir("cli_mask_opts");
  const auto a = dir / "a.bin", b = dir / "b.bin";
  const std::string base =
      "mask " + q(fixture("rig_nuscenes_like.poses")) + " --view CAM_BACK -H 3 -W 4 --frame 2 ";
  ASSERT_EQ(run_cli(base + "--tau-mode global --residual sampson -o " + q(a), dir.path()).exit_code,
            0);
  const auto m = io::read_mask_file(a);
  EXPECT_EQ(m.mode, TauMode::Global);
  EXPECT_EQ(m.bits.count(), static_cast<Eigen::Index>(row_budget(0.25, 12 * 24)));
  ASSERT_EQ(run_cli(base + "--ratio 0.5 -o " + q(b), dir.path()).exit_code, 0);
  EXPECT_EQ(io::read_mask_file(b).ratio, 0.5);
}

TEST(Cli, MaskWithoutNeighborsFailsWithoutOutput) {
  TempDir dir("cli_mask_fail");
  const auto out = dir / "m.bin";
  const auto r = run_cli("mask " + q(fixture("stereo_pair.poses")) + " --view left -H 2 -W 2 -o " +
                             q(out),
                         dir.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("no neighbors"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));

  const auto bad_ratio = run_cli("mask " + q(fixture("rig_nuscenes_like.poses")) +
                                     " --view CAM_BACK -H 2 -W 2 --ratio 1.5 -o " + q(out),
                                 dir.path());
  EXPECT_EQ(bad_ratio.exit_code, 2);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, MalformedInputIsValidationError) {
  TempDir dir("cli_malformed");
  const auto out = dir / "p.bin";
  const auto r = run_cli("plucker " + q(fixture("malformed.poses")) + " --view cam -H 2 -W 2 -o " +
                             q(out),
                         dir.path());
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find("malformed.poses:3:"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, RelposeJson) {
  TempDir dir("cli_relpose");
  const auto r = run_cli("relpose " + q(fixture("stereo_pair.poses")) + " --local left --neighbor right",
                         dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["t"][0].get<double>(), -0.5);
  EXPECT_EQ(j["t"][1].get<double>(), 0.0);
  EXPECT_EQ(j["R"][0][0].get<double>(), 1.0);
  const auto unknown = run_cli(
      "relpose " + q(fixture("stereo_pair.poses")) + " --local left --neighbor nope", dir.path());
  EXPECT_EQ(unknown.exit_code, 2);
}

TEST(Cli, EvalReport) {
  TempDir dir("cli_eval");
  const auto json_out = dir / "r.json";
  const auto r = run_cli("eval " + q(fixture("eval_gen_one_failed.traj")) + " " +
                             q(fixture("eval_gt_pair.traj")) + " --json " + q(json_out),
                         dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("n_samples=2\nn_success=1\nsuccess_rate=0.5\n"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(json_out));
  EXPECT_EQ(j["success_rate"].get<double>(), 0.5);
  EXPECT_NEAR(j["rot_err_deg"].get<double>(), 10.0, 1e-9);

  const auto same = run_cli("eval " + q(fixture("eval_gt_pair.traj")) + " " +
                                q(fixture("eval_gt_pair.traj")),
                            dir.path());
  EXPECT_EQ(same.out,
            "n_samples=2\nn_success=2\nsuccess_rate=1\nrot_err=0\nrot_err_deg=0\ntrans_err=0\n");

  const auto mismatch = run_cli("eval " + q(fixture("eval_gen_rot5.traj")) + " " +
                                    q(fixture("eval_gt_pair.traj")),
                                dir.path());
  EXPECT_EQ(mismatch.exit_code, 2);
}

TEST(Cli, EvalAllFailedIsUndefined) {
  TempDir dir("cli_eval_undef");
  const auto gen = dir / "gen.traj";
  io::atomic_write(gen, "sample dolly\nframe 0 missing\n");
  const auto gt = dir / "gt.traj";
  io::atomic_write(gt, "sample dolly\nframe 0 1 0 0 0 1 0 0 0 1 0 0 0\n");
  const auto r = run_cli("eval " + q(gen) + " " + q(gt), dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("rot_err=undefined"), std::string::npos);
  EXPECT_NE(r.out.find("trans_err=undefined"), std::string::npos);
}

TEST(Cli, DropoutSchedule) {
  TempDir dir("cli_dropout");
  const auto r = run_cli("dropout-schedule --seed 9 --start 5 --steps 3", dir.path());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "step,bbox_3d,bev_map,first_frame,neighbor_view");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  EXPECT_EQ(r.out.find("\n5,"), r.out.find('\n'));

  const auto s = run_cli("dropout-schedule --seed 42 --steps 100000 --summary", dir.path());
  ASSERT_EQ(s.exit_code, 0);
  EXPECT_NE(s.out.find("steps=100000\n"), std::string::npos);
  const auto forced = run_cli("dropout-schedule --steps 50 --summary --prob bev_map 1 --prob "
                              "neighbor_view 0",
                              dir.path());
  EXPECT_NE(forced.out.find("bev_map=1.000000"), std::string::npos);
  EXPECT_NE(forced.out.find("neighbor_view=0.000000"), std::string::npos);
  EXPECT_EQ(run_cli("dropout-schedule --prob bev_map 2", dir.path()).exit_code, 2);
  EXPECT_EQ(run_cli("dropout-schedule --steps -1", dir.path()).exit_code, 2);
}

TEST(Cli, EveryCommandIsDeterministic) {
  TempDir dir("cli_det");
  const std::vector<std::string> commands{
      "plucker " + q(fixture("rig_nuscenes_like.poses")) + " --view CAM_BACK -H 5 -W 7 -o " +
          q(dir / "out.bin"),
      "mask " + q(fixture("rig_nuscenes_like.poses")) + " --view CAM_FRONT_RIGHT -H 4 -W 4 -o " +
          q(dir / "out.bin") + " --pgm " + q(dir / "out.pgm"),
      "fundamental " + q(fixture("rig_nuscenes_like.poses")) +
          " --local CAM_BACK --neighbor CAM_BACK_LEFT -o " + q(dir / "out.bin"),
      "relpose " + q(fixture("rig_nuscenes_like.poses")) +
          " --local CAM_BACK --neighbor CAM_BACK_LEFT -o " + q(dir / "out.bin"),
      "eval " + q(fixture("eval_gen_one_failed.traj")) + " " + q(fixture("eval_gt_pair.traj")) +
          " --json " + q(dir / "out.bin"),
      "dropout-schedule --seed 3 --steps 20 -o " + q(dir / "out.bin"),
  };
  for (const auto& cmd : commands) {
    std::filesystem::remove(dir / "out.bin");
    const auto a = run_cli(cmd, dir.path());
    ASSERT_EQ(a.exit_code, 0) << cmd << "\n" << a.err;
    const std::string first = slurp(dir / "out.bin");
    ASSERT_FALSE(first.empty()) << cmd;
    std::filesystem::remove(dir / "out.bin");
    const auto b = run_cli(cmd, dir.path());
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_EQ(slurp(dir / "out.bin"), first) << cmd;
  }
}

TEST(Cli, SelfcheckPasses) {
  TempDir dir("cli_selfcheck");
  const auto r = run_cli("selfcheck", dir.path());
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
}

} // namespace
} // namespace camgeo
