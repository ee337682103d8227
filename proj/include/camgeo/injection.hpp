#pragma once

// Dense f64 reference of the camera-injection temporal attention block and
// the epipolar-masked neighbor-view cross-attention.
//
//   z_cam = Linear_in(concat(z, p))
//   z_cam = Linear_out(TemporalAttn_cam(z_cam))
//   z_out = z_cam + TemporalAttn_pretrained(z)
//
// Temporal attention runs along the frame axis independently at every
// spatial location. Each block is a single attention layer (no MLP, no
// residual inside TemporalAttn). Every reduction has a fixed order, so two
// evaluations of the same inputs are bit-identical.

#include "camgeo/epipolar.hpp"
#include "camgeo/plucker.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace camgeo {

class LatentFeature {
public:
  /// Throws ValidationError on non-positive dims, mis-sized frames or
  /// non-finite entries.
  LatentFeature(int channels, int h, int w, std::vector<Eigen::MatrixXd> frames);

  static LatentFeature zeros(int frames, int channels, int h, int w);
  static LatentFeature random(int frames, int channels, int h, int w, std::mt19937_64& rng);
  /// Channels-first copy of a plucker tensor (frames, 6, h, w).
  static LatentFeature from_plucker(const PluckerTensor& p);

  int frames() const { return static_cast<int>(frames_.size()); }
  int channels() const { return channels_; }
  int height() const { return h_; }
  int width() const { return w_; }

  /// channels x (h*w) for frame f; column v * w + u.
  const Eigen::MatrixXd& frame(int f) const { return frames_[static_cast<std::size_t>(f)]; }
  Eigen::MatrixXd& frame(int f) { return frames_[static_cast<std::size_t>(f)]; }

  /// channels x frames token matrix at spatial index q.
  Eigen::MatrixXd tokens_at(Eigen::Index q) const;
  void set_tokens_at(Eigen::Index q, const Eigen::MatrixXd& tokens);

  bool operator==(const LatentFeature& other) const;

private:
  int channels_;
  int h_;
  int w_;
  std::vector<Eigen::MatrixXd> frames_;
};

struct AttentionParams {
  int heads = 1;
  int head_dim = 1;
  Eigen::MatrixXd wq; // inner x query_dim
  Eigen::MatrixXd wk; // inner x key_dim
  Eigen::MatrixXd wv; // inner x key_dim
  Eigen::MatrixXd wo; // query_dim x inner

  int inner_dim() const { return heads * head_dim; }
  int query_dim() const { return static_cast<int>(wq.cols()); }
  int key_dim() const { return static_cast<int>(wk.cols()); }

  /// Throws ValidationError unless query_dim == heads * head_dim and all
  /// projection shapes agree.
  void validate() const;

  /// Gaussian entries scaled by 1/sqrt(fan_in).
  static AttentionParams random(int heads, int head_dim, int key_dim, std::mt19937_64& rng);
};

struct InjectionBlockWeights {
  Eigen::MatrixXd linear_in;  // c x (c + 6)
  Eigen::VectorXd bias_in;    // c
  AttentionParams temporal_attn_cam;
  Eigen::MatrixXd linear_out; // c x c
  Eigen::VectorXd bias_out;   // c
  AttentionParams temporal_attn_pretrained;

  int channels() const { return static_cast<int>(linear_out.rows()); }
  void validate() const;

  /// Fresh block around `pretrained`: linear_in = [I | 0] with zero bias, the
  /// camera attention a copy of the pretrained one, linear_out all zero.
  static InjectionBlockWeights fresh(const AttentionParams& pretrained);
  bool is_zero_initialized() const;
};

/// Multi-head scaled dot-product attention of queries x (query_dim x nq) over
/// keys/values y (key_dim x nk). `mask`, when given, is nq x nk; false
/// entries are excluded. Throws ValidationError("empty attention row") when a
/// query has no unmasked key.
Eigen::MatrixXd attend(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                       const AttentionParams& params, const RowMajorMatrixXb* mask = nullptr);

/// Softmax weights of one head (nq x nk), exposed for normalization checks.
Eigen::MatrixXd attention_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  const AttentionParams& params, int head,
                                  const RowMajorMatrixXb* mask = nullptr);

LatentFeature temporal_attention(const LatentFeature& z, const AttentionParams& params);

/// Throws ValidationError when z and p disagree on (frames, h, w).
LatentFeature inject_camera(const LatentFeature& z, const LatentFeature& p,
                            const InjectionBlockWeights& weights);
LatentFeature inject_camera(const LatentFeature& z, const PluckerTensor& p,
                            const InjectionBlockWeights& weights);

/// Per frame, queries are the h*w positions of z; keys are the 2*h*w
/// positions of `neighbor_cond` (frames, c', h, 2w), left neighbor in columns
/// [0, w) and right neighbor in [w, 2w), addressed in mask key order.
LatentFeature masked_cross_attention(const LatentFeature& z, const LatentFeature& neighbor_cond,
                                     const EpipolarMask& mask, const AttentionParams& params);

/// Reorders a (c', h, 2w) frame into mask key order (c' x 2hw).
Eigen::MatrixXd neighbor_keys(const Eigen::MatrixXd& cond_frame, int h, int w);

// Gradients of loss = sum of all outputs.

struct AttentionGrads {
  Eigen::MatrixXd wq, wk, wv, wo;
  static AttentionGrads zeros_like(const AttentionParams& p);
};

struct TemporalAttentionGrads {
  LatentFeature z;
  AttentionGrads params;
};
TemporalAttentionGrads temporal_attention_gradient(const LatentFeature& z,
                                                   const AttentionParams& params);

struct InjectionGrads {
  LatentFeature z;
  LatentFeature p;
  Eigen::MatrixXd linear_in;
  Eigen::VectorXd bias_in;
  AttentionGrads temporal_attn_cam;
  Eigen::MatrixXd linear_out;
  Eigen::VectorXd bias_out;
  AttentionGrads temporal_attn_pretrained;
};
InjectionGrads inject_camera_gradient(const LatentFeature& z, const LatentFeature& p,
                                      const InjectionBlockWeights& weights);

struct CrossAttentionGrads {
  LatentFeature z;
  LatentFeature neighbor_cond;
  AttentionGrads params;
};
CrossAttentionGrads masked_cross_attention_gradient(const LatentFeature& z,
                                                    const LatentFeature& neighbor_cond,
                                                    const EpipolarMask& mask,
                                                    const AttentionParams& params);

} // namespace camgeo
