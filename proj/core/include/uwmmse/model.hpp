#pragma once

#include "uwmmse/channel.hpp"
#include "uwmmse/grad.hpp"
#include "uwmmse/metrics.hpp"
#include "uwmmse/wmmse.hpp"

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace uwmmse::model {

enum class PsiVariant { Gcn, Regnn };

std::string_view to_string(PsiVariant v) noexcept;
PsiVariant psi_variant_from_name(std::string_view name);

/// Two-stage graph convolution producing one value in (0, 1) per node:
///   Z   = relu(diag(H) Q w11 + H Q w12)       (m x F)
///   out = sigmoid(diag(H) Z w21 + H Z w22)   (m)
struct GcnParams {
  Mat w11;  // F' x F
  Mat w12;  // F' x F
  Mat w21;  // F x 1
  Mat w22;  // F x 1
};

/// Polynomial graph filters with one feature channel per layer:
///   z_l = relu(sum_k nu_lk H^k z_{l-1}); the last layer uses sigmoid.
struct RegnnParams {
  std::vector<Mat> taps;  // one (K'+1) x 1 array per layer
};

using PsiParams = std::variant<GcnParams, RegnnParams>;

struct LayerParams {
  PsiParams theta_a;
  PsiParams theta_b;
};

inline constexpr int kDefaultRegnnLayers = 3;
inline constexpr int kDefaultRegnnTaps = 2;

struct ModelParams {
  PsiVariant variant = PsiVariant::Gcn;
  int hidden = 4;    // F
  int features = 1;  // F'
  int regnn_layers = kDefaultRegnnLayers;
  int regnn_taps = kDefaultRegnnTaps;
  std::uint64_t seed = 0;
  std::vector<LayerParams> layers;

  [[nodiscard]] int depth() const noexcept { return static_cast<int>(layers.size()); }

  /// Every trainable array in a fixed order: per layer, theta_a then theta_b,
  /// each in declaration order. Tape parameter ids follow this order.
  [[nodiscard]] std::vector<Mat*> tensors();
  [[nodiscard]] std::vector<const Mat*> tensors() const;
  [[nodiscard]] std::size_t parameter_count() const;
};

ModelParams init_params(std::uint64_t seed, int hidden, int features, int depth,
                        PsiVariant variant = PsiVariant::Gcn, int regnn_layers = kDefaultRegnnLayers,
                        int regnn_taps = kDefaultRegnnTaps);

/// All-ones feature column, the featureless default.
Mat default_features(Eigen::Index m);

Vec psi_gcn(const ChannelState& h, const Mat& q, const GcnParams& theta);
Vec psi_regnn(const ChannelState& h, const Mat& q, const RegnnParams& theta);
Vec psi(const ChannelState& h, const Mat& q, const PsiParams& theta);

struct LayerTrace {
  Vec a;
  Vec b;
  Vec u;
  Vec w;
  Vec v;
};

struct UnfoldTrace {
  Vec v0;
  std::vector<LayerTrace> layers;
};

struct ForwardResult {
  Vec p;
  UnfoldTrace trace;
};

/// Unfolded WMMSE: per layer a, b from Psi(H, Q), then the u, w, v block
/// updates. Returns p = (v^(K))^2.
ForwardResult forward(const ChannelState& h, const Mat& q, const ModelParams& theta,
                      const ProblemConfig& cfg);

/// Same recursion with Psi replaced by fixed a and b vectors.
ForwardResult forward_override(const ChannelState& h, const Vec& a, const Vec& b, int depth,
                               const ProblemConfig& cfg);

/// Per-layer residual of the necessary convergence condition
///   r_i = sum_{j != i} h_ji^2 (u*_j)^2 (w*_i b_j - w*_j b_i),  w*_i = 1/(u*_i h_ii v*_i)
/// evaluated against a converged classical solve. Nodes whose optimal power is
/// at either end of [0, p_max] (v*_i below 1e-6 or within 1e-6 of sqrt(p_max))
/// are excluded and reported as 0.
std::vector<Vec> theorem1_residual(const UnfoldTrace& trace, const wmmse::SolveResult& fixed_point,
                                   const ChannelState& h);

/// Mask of nodes that enter theorem1_residual.
std::vector<bool> theorem1_included(const wmmse::SolveResult& fixed_point);

// ---------------------------------------------------------------------------
// Differentiable forward pass on a grad::Tape.

/// Channel-derived constants of one sample, bound to a tape.
struct TapeChannel {
  Eigen::Index m = 0;
  grad::Var gains;         // H
  grad::Var diag;          // diag(H) as an m x m matrix
  grad::Var squared;       // H .* H
  grad::Var squared_t;     // (H .* H)^T
  grad::Var interference;  // H .* H with zero diagonal
  grad::Var direct;        // h_ii
  grad::Var direct_sq;     // h_ii^2
  grad::Var noise_var;     // sigma^2 * 1
  grad::Var ones;
  grad::Var features;      // Q
  std::vector<grad::Var> regnn_selectors;
};

TapeChannel bind_channel(grad::Tape& tape, const ChannelState& h, const Mat& q, double noise_std,
                         int regnn_taps = kDefaultRegnnTaps);

/// Parameter leaves for every layer; ids follow ModelParams::tensors().
struct TapeParams {
  std::vector<std::vector<grad::Var>> a;
  std::vector<std::vector<grad::Var>> b;
};

TapeParams bind_params(grad::Tape& tape, const ModelParams& theta);

/// Rebuilds TapeParams from a flat leaf list (e.g. from finite_diff_check).
TapeParams split_params(const ModelParams& shape, const std::vector<grad::Var>& leaves);

grad::Var psi_tape(const TapeChannel& ch, const std::vector<grad::Var>& theta, const ModelParams& shape);

struct TapeForward {
  grad::Var p;
  std::vector<grad::Var> a;
  std::vector<grad::Var> b;
  std::vector<grad::Var> v;
};

TapeForward forward_tape(const TapeChannel& ch, const TapeParams& params, const ModelParams& shape,
                         const ProblemConfig& cfg);

/// Rates in bits for a tape power vector.
grad::Var rates_tape(const TapeChannel& ch, grad::Var p);
/// Sum of beta_i over the rate vector.
grad::Var sum_utility_tape(const TapeChannel& ch, grad::Var c, const UtilityKind& kind);

}  // namespace uwmmse::model
