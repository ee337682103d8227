#include "camgeo/gradcheck.hpp"

#include "camgeo/error.hpp"

#include <cmath>
#include <algorithm>
#include <memory>
#include <string>
#include <tuple>

namespace camgeo {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void ParameterLayout::add(std::string name, Index rows, Index cols) {
  blocks_.push_back({std::move(name), size_, rows, cols});
  size_ += rows * cols;
}

const ParameterBlock& ParameterLayout::block(const std::string& name) const {
  for (const auto& b : blocks_)
    if (b.name == name) return b;
  throw ValidationError("parameter layout: no block named '" + name + "'");
}

VectorXd ParameterLayout::pack(const std::vector<const MatrixXd*>& values) const {
  if (values.size() != blocks_.size()) throw ValidationError("parameter layout: block count");
  VectorXd flat(size_);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    if (values[i]->rows() != b.rows || values[i]->cols() != b.cols)
      throw ValidationError("parameter layout: shape of block '" + b.name + "'");
    flat.segment(b.offset, b.size()) = values[i]->reshaped();
  }
  return flat;
}

std::vector<MatrixXd> ParameterLayout::unpack(const VectorXd& flat) const {
  std::vector<MatrixXd> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) out.emplace_back(flat.segment(b.offset, b.size()).reshaped(b.rows, b.cols));
  return out;
}

namespace {

// Latent features travel through the flat vector as channels x (frames*h*w).
MatrixXd stack_frames(const LatentFeature& z) {
  const Index hw = static_cast<Index>(z.height()) * z.width();
  MatrixXd m(z.channels(), z.frames() * hw);
  for (int f = 0; f < z.frames(); ++f) m.middleCols(f * hw, hw) = z.frame(f);
  return m;
}

LatentFeature unstack_frames(const MatrixXd& m, const LatentFeature& like) {
  const Index hw = static_cast<Index>(like.height()) * like.width();
  std::vector<MatrixXd> frames;
  for (int f = 0; f < like.frames(); ++f) frames.emplace_back(m.middleCols(f * hw, hw));
  return {like.channels(), like.height(), like.width(), std::move(frames)};
}

double total(const LatentFeature& z) {
  double s = 0.0;
  for (int f = 0; f < z.frames(); ++f) s += z.frame(f).sum();
  return s;
}

void add_attention(ParameterLayout& layout, const std::string& prefix, const AttentionParams& p) {
  layout.add(prefix + ".wq", p.wq.rows(), p.wq.cols());
  layout.add(prefix + ".wk", p.wk.rows(), p.wk.cols());
  layout.add(prefix + ".wv", p.wv.rows(), p.wv.cols());
  layout.add(prefix + ".wo", p.wo.rows(), p.wo.cols());
}

AttentionParams attention_from(const std::vector<MatrixXd>& m, std::size_t at,
                               const AttentionParams& like) {
  AttentionParams p = like;
  p.wq = m[at];
  p.wk = m[at + 1];
  p.wv = m[at + 2];
  p.wo = m[at + 3];
  return p;
}

} // namespace

Objective temporal_attention_objective(const LatentFeature& z, const AttentionParams& params) {
  auto layout = std::make_shared<ParameterLayout>();
  layout->add("z", z.channels(), static_cast<Index>(z.frames()) * z.height() * z.width());
  add_attention(*layout, "attn", params);

  auto unpack = [layout, z, params](const VectorXd& x) {
    const auto m = layout->unpack(x);
    return std::pair{unstack_frames(m[0], z), attention_from(m, 1, params)};
  };
  DifferentiableFunction fn{
      [unpack](const VectorXd& x) {
        const auto [zz, pp] = unpack(x);
        return total(temporal_attention(zz, pp));
      },
      [unpack, layout](const VectorXd& x) {
        const auto [zz, pp] = unpack(x);
        const auto g = temporal_attention_gradient(zz, pp);
        const MatrixXd gz = stack_frames(g.z);
        return layout->pack({&gz, &g.params.wq, &g.params.wk, &g.params.wv, &g.params.wo});
      }};
  const MatrixXd zs = stack_frames(z);
  VectorXd point = layout->pack({&zs, &params.wq, &params.wk, &params.wv, &params.wo});
  return {std::move(fn), std::move(point), *layout};
}

Objective inject_camera_objective(const LatentFeature& z, const LatentFeature& p,
                                  const InjectionBlockWeights& weights) {
  auto layout = std::make_shared<ParameterLayout>();
  const Index n = static_cast<Index>(z.frames()) * z.height() * z.width();
  layout->add("z", z.channels(), n);
  layout->add("p", 6, n);
  layout->add("linear_in", weights.linear_in.rows(), weights.linear_in.cols());
  layout->add("bias_in", weights.bias_in.size(), 1);
  add_attention(*layout, "attn_cam", weights.temporal_attn_cam);
  layout->add("linear_out", weights.linear_out.rows(), weights.linear_out.cols());
  layout->add("bias_out", weights.bias_out.size(), 1);
  add_attention(*layout, "attn_pretrained", weights.temporal_attn_pretrained);

  struct Unpacked {
    LatentFeature z, p;
    InjectionBlockWeights w;
  };
  auto unpack = [layout, z, p, weights](const VectorXd& x) {
    const auto m = layout->unpack(x);
    InjectionBlockWeights w = weights;
    w.linear_in = m[2];
    w.bias_in = m[3];
    w.temporal_attn_cam = attention_from(m, 4, weights.temporal_attn_cam);
    w.linear_out = m[8];
    w.bias_out = m[9];
    w.temporal_attn_pretrained = attention_from(m, 10, weights.temporal_attn_pretrained);
    return Unpacked{unstack_frames(m[0], z), unstack_frames(m[1], p), std::move(w)};
  };
  DifferentiableFunction fn{
      [unpack](const VectorXd& x) {
        const auto u = unpack(x);
        return total(inject_camera(u.z, u.p, u.w));
      },
      [unpack, layout](const VectorXd& x) {
        const auto u = unpack(x);
        const auto g = inject_camera_gradient(u.z, u.p, u.w);
        const MatrixXd gz = stack_frames(g.z), gp = stack_frames(g.p);
        const MatrixXd gbi = g.bias_in, gbo = g.bias_out;
        const auto& c = g.temporal_attn_cam;
        const auto& r = g.temporal_attn_pretrained;
        return layout->pack({&gz, &gp, &g.linear_in, &gbi, &c.wq, &c.wk, &c.wv, &c.wo,
                             &g.linear_out, &gbo, &r.wq, &r.wk, &r.wv, &r.wo});
      }};
  const MatrixXd zs = stack_frames(z), ps = stack_frames(p);
  const MatrixXd bi = weights.bias_in, bo = weights.bias_out;
  const auto& c = weights.temporal_attn_cam;
  const auto& r = weights.temporal_attn_pretrained;
  VectorXd point = layout->pack({&zs, &ps, &weights.linear_in, &bi, &c.wq, &c.wk, &c.wv, &c.wo,
                                 &weights.linear_out, &bo, &r.wq, &r.wk, &r.wv, &r.wo});
  return {std::move(fn), std::move(point), *layout};
}

Objective masked_cross_attention_objective(const LatentFeature& z,
                                           const LatentFeature& neighbor_cond,
                                           const EpipolarMask& mask,
                                           const AttentionParams& params) {
  auto layout = std::make_shared<ParameterLayout>();
  layout->add("z", z.channels(), static_cast<Index>(z.frames()) * z.height() * z.width());
  layout->add("neighbor_cond", neighbor_cond.channels(),
              static_cast<Index>(neighbor_cond.frames()) * neighbor_cond.height() *
                  neighbor_cond.width());
  add_attention(*layout, "attn", params);

  auto unpack = [layout, z, neighbor_cond, params](const VectorXd& x) {
    const auto m = layout->unpack(x);
    return std::tuple{unstack_frames(m[0], z), unstack_frames(m[1], neighbor_cond),
                      attention_from(m, 2, params)};
  };
  DifferentiableFunction fn{
      [unpack, mask](const VectorXd& x) {
        const auto [zz, cc, pp] = unpack(x);
        return total(masked_cross_attention(zz, cc, mask, pp));
      },
      [unpack, layout, mask](const VectorXd& x) {
        const auto [zz, cc, pp] = unpack(x);
        const auto g = masked_cross_attention_gradient(zz, cc, mask, pp);
        const MatrixXd gz = stack_frames(g.z), gc = stack_frames(g.neighbor_cond);
        return layout->pack({&gz, &gc, &g.params.wq, &g.params.wk, &g.params.wv, &g.params.wo});
      }};
  const MatrixXd zs = stack_frames(z), cs = stack_frames(neighbor_cond);
  VectorXd point = layout->pack({&zs, &cs, &params.wq, &params.wk, &params.wv, &params.wo});
  return {std::move(fn), std::move(point), *layout};
}

GradientCheckResult finite_difference_check(const DifferentiableFunction& fn,
                                            const VectorXd& point, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
    throw ValidationError("finite difference: epsilon must lie in [1e-7, 1e-3]");
  GradientCheckResult r;
  r.analytic = fn.gradient(point);
  if (r.analytic.size() != point.size())
    throw ValidationError("finite difference: gradient size differs from point size");
  if (!r.analytic.allFinite()) throw GeometryError("finite difference: non-finite analytic gradient");
  r.numeric.resize(point.size());
  VectorXd x = point;
  for (Index i = 0; i < point.size(); ++i) {
    x(i) = point(i) + epsilon;
    const double up = fn.value(x);
    x(i) = point(i) - epsilon;
    const double down = fn.value(x);
    x(i) = point(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      throw GeometryError("finite difference: non-finite loss at coordinate " + std::to_string(i));
    r.numeric(i) = (up - down) / (2.0 * epsilon);
    const double a = r.analytic(i), n = r.numeric(i);
    const double err = std::abs(a - n) / std::max({1.0, std::abs(a), std::abs(n)});
    if (err > r.max_relative_error || r.worst_index < 0) {
      r.max_relative_error = err;
      r.worst_index = i;
    }
  }
  return r;
}

} // namespace camgeo
