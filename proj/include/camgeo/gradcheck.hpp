#pragma once

// Central-difference gradient verification for the attention reference.

#include "camgeo/injection.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <vector>

namespace camgeo {

struct DifferentiableFunction {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
};

/// Named slice of a flat parameter vector.
struct ParameterBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index size() const { return rows * cols; }
};

/// Packs a fixed list of matrices into one column-major flat vector.
class ParameterLayout {
public:
  void add(std::string name, Eigen::Index rows, Eigen::Index cols);
  Eigen::Index size() const { return size_; }
  const std::vector<ParameterBlock>& blocks() const { return blocks_; }
  const ParameterBlock& block(const std::string& name) const;

  Eigen::VectorXd pack(const std::vector<const Eigen::MatrixXd*>& values) const;
  std::vector<Eigen::MatrixXd> unpack(const Eigen::VectorXd& flat) const;

private:
  std::vector<ParameterBlock> blocks_;
  Eigen::Index size_ = 0;
};

struct Objective {
  DifferentiableFunction function;
  Eigen::VectorXd point;
  ParameterLayout layout;
};

/// Loss = sum of outputs, over inputs and all weights.
Objective temporal_attention_objective(const LatentFeature& z, const AttentionParams& params);
Objective inject_camera_objective(const LatentFeature& z, const LatentFeature& p,
                                  const InjectionBlockWeights& weights);
Objective masked_cross_attention_objective(const LatentFeature& z,
                                           const LatentFeature& neighbor_cond,
                                           const EpipolarMask& mask,
                                           const AttentionParams& params);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  Eigen::Index worst_index = -1;
  Eigen::VectorXd analytic;
  Eigen::VectorXd numeric;
};

/// Compares the analytic gradient at `point` with central differences of
/// step `epsilon`. Per-coordinate error is |a - n| / max(1, |a|, |n|).
/// Throws ValidationError unless epsilon lies in [1e-7, 1e-3] and
/// GeometryError when a non-finite value is encountered.
GradientCheckResult finite_difference_check(const DifferentiableFunction& fn,
                                            const Eigen::VectorXd& point, double epsilon);

} // namespace camgeo
