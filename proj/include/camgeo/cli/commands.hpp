#pragma once

// Subcommand implementations behind the camgeo executable. Each command
// throws ValidationError / GeometryError on failure and writes files
// atomically, so a failed command leaves no output behind.

#include "camgeo/epipolar.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace camgeo::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kGeometry = 3 };

/// Maps an exception to the exit-code contract.
int exit_code_for(const std::exception& e);

struct PluckerArgs {
  std::filesystem::path pose_file;
  std::string view;
  int h = 0;
  int w = 0;
  bool normalize_first_frame = true;
  std::filesystem::path out;
};
void cmd_plucker(const PluckerArgs& args);

struct FundamentalArgs {
  std::filesystem::path pose_file;
  std::string local;
  std::string neighbor;
  std::size_t frame = 0;
  bool paper_literal_f = false;
  std::optional<std::filesystem::path> out; // stdout when absent
};
void cmd_fundamental(const FundamentalArgs& args, std::ostream& stdout_);

struct MaskArgs {
  std::filesystem::path pose_file;
  std::string view;
  int h = 0;
  int w = 0;
  double ratio = 0.25;
  std::size_t frame = 0;
  EpipolarOptions options;
  std::filesystem::path out;
  std::optional<std::filesystem::path> pgm;
};
void cmd_mask(const MaskArgs& args);

struct RelposeArgs {
  std::filesystem::path pose_file;
  std::string local;
  std::string neighbor;
  std::size_t frame = 0;
  std::optional<std::filesystem::path> out;
};
void cmd_relpose(const RelposeArgs& args, std::ostream& stdout_);

struct EvalArgs {
  std::filesystem::path gen_file;
  std::filesystem::path gt_file;
  std::optional<std::filesystem::path> json_out;
};
/// Prints key=value lines; optionally writes the same report as JSON.
void cmd_eval(const EvalArgs& args, std::ostream& stdout_);

struct DropoutArgs {
  std::uint64_t seed = 0;
  std::int64_t start = 0;
  std::int64_t steps = 10;
  std::map<std::string, double> overrides; // condition -> probability
  bool summary = false;
  std::optional<std::filesystem::path> out;
};
/// CSV schedule (step then one 0/1 column per condition), or per-condition
/// drop frequencies with `summary`.
void cmd_dropout_schedule(const DropoutArgs& args, std::ostream& stdout_);

/// Small-size versions of the zero-init, incidence, fundamental-matrix and
/// gradient suites. Prints one PASS/FAIL line per suite.
int cmd_selfcheck(std::ostream& stdout_);

} // namespace camgeo::cli
