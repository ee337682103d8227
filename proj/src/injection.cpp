#include "camgeo/injection.hpp"

#include "camgeo/error.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace camgeo {

using Eigen::Index;
using Eigen::MatrixXd;

LatentFeature::LatentFeature(int channels, int h, int w, std::vector<MatrixXd> frames)
    : channels_(channels), h_(h), w_(w), frames_(std::move(frames)) {
  if (channels < 1 || h < 1 || w < 1 || frames_.empty())
    throw ValidationError("latent feature: all dimensions must be positive");
  for (const auto& f : frames_) {
    if (f.rows() != channels || f.cols() != static_cast<Index>(h) * w)
      throw ValidationError("latent feature: frame is not channels x (h*w)");
    if (!f.allFinite()) throw ValidationError("latent feature: non-finite entry");
  }
}

LatentFeature LatentFeature::zeros(int frames, int channels, int h, int w) {
  if (frames < 1) throw ValidationError("latent feature: all dimensions must be positive");
  return {channels, h, w,
          std::vector<MatrixXd>(static_cast<std::size_t>(frames),
                                MatrixXd::Zero(channels, static_cast<Index>(h) * w))};
}

LatentFeature LatentFeature::random(int frames, int channels, int h, int w,
                                    std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  LatentFeature z = zeros(frames, channels, h, w);
  for (auto& f : z.frames_) f = f.unaryExpr([&](double) { return n(rng); });
  return z;
}

LatentFeature LatentFeature::from_plucker(const PluckerTensor& p) {
  std::vector<MatrixXd> frames;
  frames.reserve(static_cast<std::size_t>(p.frames()));
  for (int f = 0; f < p.frames(); ++f) frames.emplace_back(p.frame(f));
  return {6, p.height(), p.width(), std::move(frames)};
}

MatrixXd LatentFeature::tokens_at(Index q) const {
  MatrixXd t(channels_, frames());
  for (int f = 0; f < frames(); ++f) t.col(f) = frame(f).col(q);
  return t;
}

void LatentFeature::set_tokens_at(Index q, const MatrixXd& tokens) {
  for (int f = 0; f < frames(); ++f) frame(f).col(q) = tokens.col(f);
}

bool LatentFeature::operator==(const LatentFeature& other) const {
  if (channels_ != other.channels_ || h_ != other.h_ || w_ != other.w_ ||
      frames_.size() != other.frames_.size())
    return false;
  for (std::size_t i = 0; i < frames_.size(); ++i)
    if (frames_[i] != other.frames_[i]) return false;
  return true;
}

void AttentionParams::validate() const {
  if (heads < 1 || head_dim < 1) throw ValidationError("attention: heads and head_dim must be positive");
  const Index inner = inner_dim();
  if (wq.rows() != inner || wk.rows() != inner || wv.rows() != inner || wo.cols() != inner)
    throw ValidationError("attention: projection inner dims must equal heads * head_dim");
  if (wq.cols() != inner || wo.rows() != inner)
    throw ValidationError("attention: channel count must equal heads * head_dim");
  if (wv.cols() != wk.cols()) throw ValidationError("attention: key and value input dims differ");
}

AttentionParams AttentionParams::random(int heads, int head_dim, int key_dim,
                                        std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const int inner = heads * head_dim;
  auto init = [&](Index rows, Index cols) {
    const double s = 1.0 / std::sqrt(static_cast<double>(cols));
    return MatrixXd(MatrixXd::Zero(rows, cols).unaryExpr([&](double) { return s * n(rng); }));
  };
  AttentionParams p;
  p.heads = heads;
  p.head_dim = head_dim;
  p.wq = init(inner, inner);
  p.wk = init(inner, key_dim);
  p.wv = init(inner, key_dim);
  p.wo = init(inner, inner);
  return p;
}

void InjectionBlockWeights::validate() const {
  const Index c = linear_out.rows();
  if (c < 1 || linear_out.cols() != c) throw ValidationError("injection: linear_out must be c x c");
  if (linear_in.rows() != c || linear_in.cols() != c + 6)
    throw ValidationError("injection: linear_in must be c x (c + 6)");
  if (bias_in.size() != c || bias_out.size() != c) throw ValidationError("injection: bias size");
  temporal_attn_cam.validate();
  temporal_attn_pretrained.validate();
  if (temporal_attn_cam.query_dim() != c || temporal_attn_cam.key_dim() != c ||
      temporal_attn_pretrained.query_dim() != c || temporal_attn_pretrained.key_dim() != c)
    throw ValidationError("injection: attention channel count differs from c");
}

InjectionBlockWeights InjectionBlockWeights::fresh(const AttentionParams& pretrained) {
  pretrained.validate();
  const Index c = pretrained.query_dim();
  InjectionBlockWeights w;
  w.linear_in = MatrixXd::Zero(c, c + 6);
  w.linear_in.leftCols(c).setIdentity();
  w.bias_in = Eigen::VectorXd::Zero(c);
  w.temporal_attn_cam = pretrained;
  w.linear_out = MatrixXd::Zero(c, c);
  w.bias_out = Eigen::VectorXd::Zero(c);
  w.temporal_attn_pretrained = pretrained;
  return w;
}

bool InjectionBlockWeights::is_zero_initialized() const {
  const Index c = linear_out.rows();
  return linear_in.leftCols(c).isIdentity(0.0) && linear_in.rightCols(6).isZero(0.0) &&
         bias_in.isZero(0.0) && linear_out.isZero(0.0) && bias_out.isZero(0.0);
}

namespace {

struct Forward {
  MatrixXd q, k, v;
  std::vector<MatrixXd> probs; // per head, nq x nk
  MatrixXd ctx;                // inner x nq
  MatrixXd out;                // query_dim x nq
};

// Row softmax of `logits`, skipping entries whose mask bit is false. The max
// is taken over unmasked entries only.
MatrixXd masked_softmax(const MatrixXd& logits, const RowMajorMatrixXb* mask) {
  MatrixXd p = MatrixXd::Zero(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < logits.cols(); ++j)
      if (mask == nullptr || (*mask)(i, j)) m = std::max(m, logits(i, j));
    if (m == -std::numeric_limits<double>::infinity())
      throw ValidationError("empty attention row " + std::to_string(i));
    double sum = 0.0;
    for (Index j = 0; j < logits.cols(); ++j) {
      if (mask != nullptr && !(*mask)(i, j)) continue;
      p(i, j) = std::exp(logits(i, j) - m);
      sum += p(i, j);
    }
    p.row(i) /= sum;
  }
  return p;
}

Forward forward(const MatrixXd& x, const MatrixXd& y, const AttentionParams& params,
                const RowMajorMatrixXb* mask) {
  if (x.rows() != params.query_dim() || y.rows() != params.key_dim())
    throw ValidationError("attention: input channels do not match projections");
  if (mask != nullptr && (mask->rows() != x.cols() || mask->cols() != y.cols()))
    throw ValidationError("attention: mask shape does not match queries x keys");
  const int hd = params.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  Forward f;
  f.q = params.wq * x;
  f.k = params.wk * y;
  f.v = params.wv * y;
  f.ctx = MatrixXd(params.inner_dim(), x.cols());
  for (int h = 0; h < params.heads; ++h) {
    const Index r0 = static_cast<Index>(h) * hd;
    const MatrixXd logits = scale * (f.q.middleRows(r0, hd).transpose() * f.k.middleRows(r0, hd));
    f.probs.push_back(masked_softmax(logits, mask));
    f.ctx.middleRows(r0, hd) = f.v.middleRows(r0, hd) * f.probs.back().transpose();
  }
  f.out = params.wo * f.ctx;
  return f;
}

// Accumulates parameter gradients into `g` and returns (dx, dy) for the
// upstream gradient `dout`.
std::pair<MatrixXd, MatrixXd> backward(const MatrixXd& x, const MatrixXd& y,
                                       const AttentionParams& params, const Forward& f,
                                       const MatrixXd& dout, AttentionGrads& g) {
  const int hd = params.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
  g.wo += dout * f.ctx.transpose();
  const MatrixXd dctx = params.wo.transpose() * dout;
  MatrixXd dq(f.q.rows(), f.q.cols());
  MatrixXd dk(f.k.rows(), f.k.cols());
  MatrixXd dv(f.v.rows(), f.v.cols());
  for (int h = 0; h < params.heads; ++h) {
    const Index r0 = static_cast<Index>(h) * hd;
    const MatrixXd& p = f.probs[static_cast<std::size_t>(h)];
    const auto dc = dctx.middleRows(r0, hd);
    dv.middleRows(r0, hd) = dc * p;
    const MatrixXd dp = dc.transpose() * f.v.middleRows(r0, hd);
    MatrixXd ds(p.rows(), p.cols());
    for (Index i = 0; i < p.rows(); ++i) {
      const double inner = p.row(i).dot(dp.row(i));
      for (Index j = 0; j < p.cols(); ++j) ds(i, j) = scale * p(i, j) * (dp(i, j) - inner);
    }
    dq.middleRows(r0, hd) = f.k.middleRows(r0, hd) * ds.transpose();
    dk.middleRows(r0, hd) = f.q.middleRows(r0, hd) * ds;
  }
  g.wq += dq * x.transpose();
  g.wk += dk * y.transpose();
  g.wv += dv * y.transpose();
  return {params.wq.transpose() * dq, params.wk.transpose() * dk + params.wv.transpose() * dv};
}

void require_same_grid(const LatentFeature& a, const LatentFeature& b, int b_width,
                       const char* what) {
  if (a.frames() != b.frames() || a.height() != b.height() || b.width() != b_width)
    throw ValidationError(std::string(what) + ": frames/height/width mismatch");
}

MatrixXd concat_rows(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd u(top.rows() + bottom.rows(), top.cols());
  u << top, bottom;
  return u;
}

} // namespace

AttentionGrads AttentionGrads::zeros_like(const AttentionParams& p) {
  return {MatrixXd::Zero(p.wq.rows(), p.wq.cols()), MatrixXd::Zero(p.wk.rows(), p.wk.cols()),
          MatrixXd::Zero(p.wv.rows(), p.wv.cols()), MatrixXd::Zero(p.wo.rows(), p.wo.cols())};
}

MatrixXd attend(const MatrixXd& x, const MatrixXd& y, const AttentionParams& params,
                const RowMajorMatrixXb* mask) {
  params.validate();
  return forward(x, y, params, mask).out;
}

MatrixXd attention_weights(const MatrixXd& x, const MatrixXd& y, const AttentionParams& params,
                           int head, const RowMajorMatrixXb* mask) {
  params.validate();
  if (head < 0 || head >= params.heads) throw ValidationError("attention: head out of range");
  return forward(x, y, params, mask).probs[static_cast<std::size_t>(head)];
}

LatentFeature temporal_attention(const LatentFeature& z, const AttentionParams& params) {
  params.validate();
  if (z.channels() != params.query_dim() || params.key_dim() != params.query_dim())
    throw ValidationError("temporal attention: channel mismatch");
  LatentFeature out = z;
  const Index hw = static_cast<Index>(z.height()) * z.width();
  for (Index q = 0; q < hw; ++q) {
    const MatrixXd x = z.tokens_at(q);
    out.set_tokens_at(q, forward(x, x, params, nullptr).out);
  }
  return out;
}

LatentFeature inject_camera(const LatentFeature& z, const LatentFeature& p,
                            const InjectionBlockWeights& weights) {
  weights.validate();
  if (z.channels() != weights.channels()) throw ValidationError("inject_camera: channel mismatch");
  if (p.channels() != 6) throw ValidationError("inject_camera: camera condition must have 6 channels");
  require_same_grid(z, p, z.width(), "inject_camera");

  LatentFeature out = z;
  const Index hw = static_cast<Index>(z.height()) * z.width();
  for (Index q = 0; q < hw; ++q) {
    const MatrixXd zq = z.tokens_at(q);
    const MatrixXd zin =
        (weights.linear_in * concat_rows(zq, p.tokens_at(q))).colwise() + weights.bias_in;
    const MatrixXd cam = forward(zin, zin, weights.temporal_attn_cam, nullptr).out;
    const MatrixXd zcam = (weights.linear_out * cam).colwise() + weights.bias_out;
    const MatrixXd pre = forward(zq, zq, weights.temporal_attn_pretrained, nullptr).out;
    out.set_tokens_at(q, zcam + pre);
  }
  return out;
}

LatentFeature inject_camera(const LatentFeature& z, const PluckerTensor& p,
                            const InjectionBlockWeights& weights) {
  return inject_camera(z, LatentFeature::from_plucker(p), weights);
}

MatrixXd neighbor_keys(const MatrixXd& cond_frame, int h, int w) {
  const Index hw = static_cast<Index>(h) * w;
  MatrixXd keys(cond_frame.rows(), 2 * hw);
  for (Index k = 0; k < 2 * hw; ++k) {
    const Index side = k / hw, r = k % hw;
    keys.col(k) = cond_frame.col((r / w) * 2 * w + side * w + r % w);
  }
  return keys;
}

namespace {

void check_cross_shapes(const LatentFeature& z, const LatentFeature& cond, const EpipolarMask& mask,
                        const AttentionParams& params) {
  params.validate();
  require_same_grid(z, cond, 2 * z.width(), "masked_cross_attention");
  if (mask.h != z.height() || mask.w != z.width())
    throw ValidationError("masked_cross_attention: mask grid does not match latent grid");
  if (z.channels() != params.query_dim() || cond.channels() != params.key_dim())
    throw ValidationError("masked_cross_attention: channel mismatch");
}

MatrixXd scatter_keys(const MatrixXd& dkeys, int h, int w) {
  const Index hw = static_cast<Index>(h) * w;
  MatrixXd frame(dkeys.rows(), 2 * hw);
  for (Index k = 0; k < 2 * hw; ++k) {
    const Index side = k / hw, r = k % hw;
    frame.col((r / w) * 2 * w + side * w + r % w) = dkeys.col(k);
  }
  return frame;
}

} // namespace

LatentFeature masked_cross_attention(const LatentFeature& z, const LatentFeature& neighbor_cond,
                                     const EpipolarMask& mask, const AttentionParams& params) {
  check_cross_shapes(z, neighbor_cond, mask, params);
  LatentFeature out = z;
  for (int f = 0; f < z.frames(); ++f) {
    const MatrixXd keys = neighbor_keys(neighbor_cond.frame(f), z.height(), z.width());
    out.frame(f) = forward(z.frame(f), keys, params, &mask.bits).out;
  }
  return out;
}

TemporalAttentionGrads temporal_attention_gradient(const LatentFeature& z,
                                                   const AttentionParams& params) {
  params.validate();
  if (z.channels() != params.query_dim() || params.key_dim() != params.query_dim())
    throw ValidationError("temporal attention: channel mismatch");
  TemporalAttentionGrads g{LatentFeature::zeros(z.frames(), z.channels(), z.height(), z.width()),
                           AttentionGrads::zeros_like(params)};
  const Index hw = static_cast<Index>(z.height()) * z.width();
  for (Index q = 0; q < hw; ++q) {
    const MatrixXd x = z.tokens_at(q);
    const Forward f = forward(x, x, params, nullptr);
    const auto [dx, dy] = backward(x, x, params, f, MatrixXd::Ones(f.out.rows(), f.out.cols()),
                                   g.params);
    g.z.set_tokens_at(q, dx + dy);
  }
  return g;
}

InjectionGrads inject_camera_gradient(const LatentFeature& z, const LatentFeature& p,
                                      const InjectionBlockWeights& weights) {
  weights.validate();
  if (z.channels() != weights.channels()) throw ValidationError("inject_camera: channel mismatch");
  if (p.channels() != 6) throw ValidationError("inject_camera: camera condition must have 6 channels");
  require_same_grid(z, p, z.width(), "inject_camera");

  const Index c = weights.channels();
  InjectionGrads g{LatentFeature::zeros(z.frames(), z.channels(), z.height(), z.width()),
                   LatentFeature::zeros(p.frames(), 6, p.height(), p.width()),
                   MatrixXd::Zero(weights.linear_in.rows(), weights.linear_in.cols()),
                   Eigen::VectorXd::Zero(c),
                   AttentionGrads::zeros_like(weights.temporal_attn_cam),
                   MatrixXd::Zero(c, c),
                   Eigen::VectorXd::Zero(c),
                   AttentionGrads::zeros_like(weights.temporal_attn_pretrained)};
  const Index hw = static_cast<Index>(z.height()) * z.width();
  for (Index q = 0; q < hw; ++q) {
    const MatrixXd zq = z.tokens_at(q);
    const MatrixXd u = concat_rows(zq, p.tokens_at(q));
    const MatrixXd zin = (weights.linear_in * u).colwise() + weights.bias_in;
    const Forward cam = forward(zin, zin, weights.temporal_attn_cam, nullptr);
    const Forward pre = forward(zq, zq, weights.temporal_attn_pretrained, nullptr);
    const MatrixXd dout = MatrixXd::Ones(c, z.frames());

    g.linear_out += dout * cam.out.transpose();
    g.bias_out += dout.rowwise().sum();
    const MatrixXd dcam = weights.linear_out.transpose() * dout;
    const auto [dzin_x, dzin_y] =
        backward(zin, zin, weights.temporal_attn_cam, cam, dcam, g.temporal_attn_cam);
    const MatrixXd dzin = dzin_x + dzin_y;
    g.linear_in += dzin * u.transpose();
    g.bias_in += dzin.rowwise().sum();
    const MatrixXd du = weights.linear_in.transpose() * dzin;

    const auto [dpre_x, dpre_y] =
        backward(zq, zq, weights.temporal_attn_pretrained, pre, dout, g.temporal_attn_pretrained);
    g.z.set_tokens_at(q, du.topRows(c) + dpre_x + dpre_y);
    g.p.set_tokens_at(q, du.bottomRows(6));
  }
  return g;
}

CrossAttentionGrads masked_cross_attention_gradient(const LatentFeature& z,
                                                    const LatentFeature& neighbor_cond,
                                                    const EpipolarMask& mask,
                                                    const AttentionParams& params) {
  check_cross_shapes(z, neighbor_cond, mask, params);
  CrossAttentionGrads g{
      LatentFeature::zeros(z.frames(), z.channels(), z.height(), z.width()),
      LatentFeature::zeros(neighbor_cond.frames(), neighbor_cond.channels(),
                           neighbor_cond.height(), neighbor_cond.width()),
      AttentionGrads::zeros_like(params)};
  for (int f = 0; f < z.frames(); ++f) {
    const MatrixXd keys = neighbor_keys(neighbor_cond.frame(f), z.height(), z.width());
    const Forward fw = forward(z.frame(f), keys, params, &mask.bits);
    const auto [dx, dy] = backward(z.frame(f), keys, params, fw,
                                   MatrixXd::Ones(fw.out.rows(), fw.out.cols()), g.params);
    g.z.frame(f) = dx;
    g.neighbor_cond.frame(f) = scatter_keys(dy, z.height(), z.width());
  }
  return g;
}

} // namespace camgeo
