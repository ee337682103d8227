#include "camgeo/pose_metrics.hpp"

#include "camgeo/error.hpp"

#include <string_view>

namespace camgeo {

bool EstimatedTrajectory::successful() const {
  if (frames.empty()) return false;
  for (const auto& f : frames)
    if (!f) return false;
  return true;
}

namespace {

// Relative translations of frames 1..n-1, scaled to unit stacked L2 norm.
// Returns the raw norm so callers can detect a motionless trajectory.
double unit_translations(const std::vector<Extrinsics>& rel, std::vector<Vec3>& out) {
  out.clear();
  double sq = 0.0;
  for (std::size_t k = 1; k < rel.size(); ++k) {
    out.push_back(rel[k].translation());
    sq += rel[k].translation().squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (norm > 0.0)
    for (auto& t : out) t /= norm;
  return norm;
}

} // namespace

SampleErrors sample_errors(const std::vector<Extrinsics>& gen, const std::vector<Extrinsics>& gt) {
  if (gen.size() != gt.size())
    throw ValidationError("evaluate: generated trajectory has " + std::to_string(gen.size()) +
                          " frames, ground truth " + std::to_string(gt.size()));
  const auto gen_rel = normalize_trajectory(gen);
  const auto gt_rel = normalize_trajectory(gt);

  SampleErrors e;
  const std::size_t n = gt.size();
  if (n < 2) return e;

  double rot = 0.0;
  for (std::size_t k = 1; k < n; ++k)
    rot += rotation_geodesic(gen_rel[k].rotation(), gt_rel[k].rotation());
  e.rotation = rot / static_cast<double>(n - 1);

  std::vector<Vec3> tg, tt;
  unit_translations(gen_rel, tg);
  if (unit_translations(gt_rel, tt) > 0.0) {
    double trans = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) trans += (tg[k] - tt[k]).norm();
    e.translation = trans / static_cast<double>(n - 1);
  }
  return e;
}

TrajectoryEvalReport evaluate(const std::vector<EstimatedTrajectory>& gen,
                              const std::vector<GroundTruthTrajectory>& gt) {
  if (gen.size() != gt.size())
    throw ValidationError("evaluate: " + std::to_string(gen.size()) + " generated samples vs " +
                          std::to_string(gt.size()) + " ground-truth samples");
  if (gen.empty()) throw ValidationError("evaluate: no samples");

  TrajectoryEvalReport report;
  report.n_samples = gen.size();
  double rot_sum = 0.0, trans_sum = 0.0;
  std::size_t trans_count = 0;
  for (std::size_t i = 0; i < gen.size(); ++i) {
    if (gen[i].sample_id != gt[i].sample_id)
      throw ValidationError("evaluate: sample " + std::to_string(i) + " id '" + gen[i].sample_id +
                            "' does not match ground truth '" + gt[i].sample_id + "'");
    if (!gen[i].successful()) continue;
    std::vector<Extrinsics> frames;
    frames.reserve(gen[i].frames.size());
    for (const auto& f : gen[i].frames) frames.push_back(*f);
    const SampleErrors e = sample_errors(frames, gt[i].frames);
    ++report.n_success;
    rot_sum += e.rotation;
    if (e.translation) {
      trans_sum += *e.translation;
      ++trans_count;
    } else {
      report.warnings.push_back("sample '" + gt[i].sample_id +
                                "': ground truth has zero displacement; translation error excluded");
    }
  }

  report.success_rate =
      static_cast<double>(report.n_success) / static_cast<double>(report.n_samples);
  if (report.n_success == 0) {
    report.warnings.push_back("no successful samples; errors undefined");
    return report;
  }
  report.rot_err = rot_sum / report.success_rate;
  if (trans_count > 0) report.trans_err = trans_sum / report.success_rate;
  return report;
}

DropoutPolicy DropoutPolicy::defaults(std::uint64_t seed) {
  DropoutPolicy p;
  p.per_condition_prob = {{"first_frame", 0.40}, {"bev_map", 0.40}, {"bbox_3d", 0.40}};
  p.neighbor_view_prob = 0.50;
  p.seed = seed;
  return p;
}

void DropoutPolicy::validate() const {
  auto check = [](const std::string& name, double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError("dropout: probability for '" + name + "' outside [0, 1]");
  };
  for (const auto& [name, p] : per_condition_prob) {
    if (name == kNeighborView)
      throw ValidationError("dropout: neighbor view probability is configured separately");
    check(name, p);
  }
  check(kNeighborView, neighbor_view_prob);
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

} // namespace

double dropout_uniform(std::uint64_t seed, std::int64_t step, const std::string& condition) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(step));
  h = mix64(h ^ fnv1a(condition));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::map<std::string, bool> sample_dropout(const DropoutPolicy& policy, std::int64_t step) {
  policy.validate();
  std::map<std::string, bool> out;
  for (const auto& [name, p] : policy.per_condition_prob)
    out[name] = dropout_uniform(policy.seed, step, name) < p;
  out[DropoutPolicy::kNeighborView] =
      dropout_uniform(policy.seed, step, DropoutPolicy::kNeighborView) < policy.neighbor_view_prob;
  return out;
}

} // namespace camgeo
