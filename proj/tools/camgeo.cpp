// camgeo: camera-conditioning preprocessing and evaluation.

#include "camgeo/cli/commands.hpp"
#include "camgeo/error.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

using namespace camgeo;
using namespace camgeo::cli;

TauMode parse_tau(const std::string& s) {
  if (s == "per-row") return TauMode::PerRow;
  if (s == "global") return TauMode::Global;
  throw CLI::ValidationError("--tau-mode", "expected per-row or global");
}

ResidualKind parse_residual(const std::string& s) {
  if (s == "algebraic") return ResidualKind::Algebraic;
  if (s == "sampson") return ResidualKind::Sampson;
  throw CLI::ValidationError("--residual", "expected algebraic or sampson");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"camgeo: plucker embeddings, epipolar masks and pose metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "camgeo 1.0.0");

  PluckerArgs plucker;
  auto* c_plucker = app.add_subcommand("plucker", "Write the plucker tensor of one view");
  c_plucker->add_option("pose_file", plucker.pose_file, "Pose file")->required()->check(CLI::ExistingFile);
  c_plucker->add_option("--view", plucker.view, "View id")->required();
  c_plucker->add_option("--height,-H", plucker.h, "Grid height")->required();
  c_plucker->add_option("--width,-W", plucker.w, "Grid width")->required();
  c_plucker->add_flag("--normalize-first-frame,!--no-normalize-first-frame",
                      plucker.normalize_first_frame,
                      "Express poses relative to the first frame (default on)");
  c_plucker->add_option("--out,-o", plucker.out, "Output tensor file")->required();

  FundamentalArgs fundamental;
  std::string fundamental_out;
  auto* c_fund = app.add_subcommand("fundamental", "Print the fundamental matrix neighbor -> local");
  c_fund->add_option("pose_file", fundamental.pose_file, "Pose file")->required()->check(CLI::ExistingFile);
  c_fund->add_option("--local", fundamental.local, "Local (target) view")->required();
  c_fund->add_option("--neighbor", fundamental.neighbor, "Neighbor (source) view")->required();
  c_fund->add_option("--frame", fundamental.frame, "Frame index (default 0)");
  c_fund->add_flag("--paper-literal-F", fundamental.paper_literal_f,
                   "Use K_N^-1 R [t]x K_L^-1 instead of the projection-validated form");
  c_fund->add_option("--out,-o", fundamental_out, "Write JSON here instead of stdout");

  MaskArgs mask;
  std::string tau = "per-row", residual = "algebraic", pgm;
  auto* c_mask = app.add_subcommand("mask", "Write the epipolar cross-attention mask of one view");
  c_mask->add_option("pose_file", mask.pose_file, "Pose file")->required()->check(CLI::ExistingFile);
  c_mask->add_option("--view", mask.view, "Local view id")->required();
  c_mask->add_option("--height,-H", mask.h, "Grid height")->required();
  c_mask->add_option("--width,-W", mask.w, "Grid width")->required();
  c_mask->add_option("--ratio", mask.ratio, "Fraction of keys kept (default 0.25)");
  c_mask->add_option("--frame", mask.frame, "Frame index (default 0)");
  c_mask->add_option("--tau-mode", tau, "per-row (default) or global");
  c_mask->add_option("--residual", residual, "algebraic (default) or sampson");
  c_mask->add_flag("--paper-literal-F", mask.options.paper_literal_f, "Compatibility F formula");
  c_mask->add_option("--out,-o", mask.out, "Output mask file")->required();
  c_mask->add_option("--pgm", pgm, "Also write a PGM rendition");

  RelposeArgs relpose;
  std::string relpose_out;
  auto* c_rel = app.add_subcommand("relpose", "Print the pose of the local view in the neighbor frame");
  c_rel->add_option("pose_file", relpose.pose_file, "Pose file")->required()->check(CLI::ExistingFile);
  c_rel->add_option("--local", relpose.local, "Local view")->required();
  c_rel->add_option("--neighbor", relpose.neighbor, "Neighbor view")->required();
  c_rel->add_option("--frame", relpose.frame, "Frame index (default 0)");
  c_rel->add_option("--out,-o", relpose_out, "Write JSON here instead of stdout");

  EvalArgs eval;
  std::string eval_json;
  auto* c_eval = app.add_subcommand("eval", "Success-rate weighted rotation/translation errors");
  c_eval->add_option("gen_file", eval.gen_file, "Estimated trajectories")->required()->check(CLI::ExistingFile);
  c_eval->add_option("gt_file", eval.gt_file, "Ground-truth trajectories")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--json", eval_json, "Also write the report as JSON");

  DropoutArgs dropout;
  std::map<std::string, double> probs;
  std::string dropout_out;
  auto* c_drop = app.add_subcommand("dropout-schedule", "Per-step condition dropout decisions");
  c_drop->add_option("--seed", dropout.seed, "Seed (default 0)");
  c_drop->add_option("--start", dropout.start, "First step (default 0)");
  c_drop->add_option("--steps", dropout.steps, "Number of steps (default 10)");
  c_drop->add_option("--prob", probs, "Override a probability: NAME VALUE (repeatable)");
  c_drop->add_flag("--summary", dropout.summary, "Print drop frequencies instead of the schedule");
  c_drop->add_option("--out,-o", dropout_out, "Write here instead of stdout");

  auto* c_self = app.add_subcommand("selfcheck", "Run the built-in verification suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_plucker->parsed()) {
      cmd_plucker(plucker);
    } else if (c_fund->parsed()) {
      if (!fundamental_out.empty()) fundamental.out = fundamental_out;
      cmd_fundamental(fundamental, std::cout);
    } else if (c_mask->parsed()) {
      mask.options.tau = parse_tau(tau);
      mask.options.residual = parse_residual(residual);
      if (!pgm.empty()) mask.pgm = pgm;
      cmd_mask(mask);
    } else if (c_rel->parsed()) {
      if (!relpose_out.empty()) relpose.out = relpose_out;
      cmd_relpose(relpose, std::cout);
    } else if (c_eval->parsed()) {
      if (!eval_json.empty()) eval.json_out = eval_json;
      cmd_eval(eval, std::cout);
    } else if (c_drop->parsed()) {
      dropout.overrides = probs;
      if (!dropout_out.empty()) dropout.out = dropout_out;
      cmd_dropout_schedule(dropout, std::cout);
    } else if (c_self->parsed()) {
      return cmd_selfcheck(std::cout);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "camgeo: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "camgeo: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kOk;
}
