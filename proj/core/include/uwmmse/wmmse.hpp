#pragma once

#include "uwmmse/channel.hpp"
#include "uwmmse/metrics.hpp"

#include <vector>

namespace uwmmse::wmmse {

struct SolveOptions {
  int max_iter = 100;
  double tol = 1e-6;
  UtilityKind utility;
  double p_max = 1.0;
  double noise_std = 1.0;

  void validate() const;
};

struct SolveResult {
  Vec p;
  int iterations = 0;
  /// MSE-reformulation objective after each completed iteration (sum-rate
  /// utility only; empty otherwise).
  std::vector<double> objective_trace;
  bool converged = false;
  Vec u;
  Vec w;
  Vec v;
  /// Problem constants the solve ran with, so the fixed point is self-contained.
  double noise_std = 0.0;
  double p_max = 0.0;
};

/// sum_i (w_i e_i - ln w_i) with e_i the per-node mean-square error.
double mse_objective(const Vec& w, const Vec& u, const Vec& v, const ChannelState& h, double noise_std);

/// Per-node MSE e_i for the given receiver and transmitter variables.
Vec mse(const Vec& u, const Vec& v, const ChannelState& h, double noise_std);

/// Receiver update: u_i = h_ii v_i / (sigma^2 + sum_j h_ij^2 v_j^2).
Vec update_u(const Vec& v, const ChannelState& h, double noise_std);

/// Weight update: w_i = gamma'_i(1 - u_i h_ii v_i) a_i + b_i.
/// The argument of gamma' is clamped from below at kDivisionGuard.
Vec update_w(const Vec& u, const Vec& v, const ChannelState& h, const Vec& a, const Vec& b,
             const UtilityKind& kind);

/// 1 - u_i h_ii v_i for u = update_u(v), evaluated as
///   (sigma^2 + sum_{j != i} h_ij^2 v_j^2) / (sigma^2 + sum_j h_ij^2 v_j^2)
/// so that it keeps full relative precision when the SINR is large.
Vec residual_fraction(const Vec& v, const ChannelState& h, double noise_std);

struct ReceiverStep {
  Vec u;
  Vec w;
};

/// update_u followed by update_w, with the gamma' argument taken from
/// residual_fraction instead of the cancelling difference.
ReceiverStep update_uw(const Vec& v, const ChannelState& h, double noise_std, const Vec& a, const Vec& b,
                       const UtilityKind& kind);

/// Transmitter update: v_i = clamp(u_i h_ii w_i / sum_j h_ji^2 u_j^2 w_j, 0, sqrt(p_max)).
Vec update_v(const Vec& u, const Vec& w, const ChannelState& h, double p_max);

/// Block-coordinate WMMSE from v = sqrt(p_max), stopping when the relative
/// sup-norm change of v drops below tol or after max_iter iterations.
SolveResult solve(const ChannelState& h, const SolveOptions& opts);

/// Exactly k iterations, no convergence test.
SolveResult solve_truncated(const ChannelState& h, const SolveOptions& opts, int k);

/// Number of w-update arguments clamped by the guard since process start.
std::size_t guard_clamp_count() noexcept;

}  // namespace uwmmse::wmmse
