#include "uwmmse/wmmse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>

namespace uwmmse::wmmse {

namespace {

std::atomic<std::size_t> g_guard_clamps{0};

void check_len(const Vec& x, Eigen::Index m, const char* what) {
  if (x.size() != m) throw ShapeError(std::string(what) + " length does not match channel size");
}

SolveResult run(const ChannelState& h, const SolveOptions& opts, int iterations, bool stop_early) {
  opts.validate();
  opts.utility.require_solver_support(h.m());
  const Eigen::Index m = h.m();
  const Vec ones = Vec::Ones(m);
  const Vec zeros = Vec::Zero(m);

  SolveResult out;
  out.noise_std = opts.noise_std;
  out.p_max = opts.p_max;
  out.v = Vec::Constant(m, std::sqrt(opts.p_max));
  // The MSE reformulation is the sum-rate objective; other utilities have none here.
  const bool track_objective = opts.utility.tag() == UtilityTag::SumRate;
  if (track_objective) out.objective_trace.reserve(static_cast<std::size_t>(iterations));
  for (int k = 0; k < iterations; ++k) {
    const Vec v_prev = out.v;
    auto step = update_uw(v_prev, h, opts.noise_std, ones, zeros, opts.utility);
    out.u = std::move(step.u);
    out.w = std::move(step.w);
    out.v = update_v(out.u, out.w, h, opts.p_max);
    if (track_objective) out.objective_trace.push_back(mse_objective(out.w, out.u, out.v, h, opts.noise_std));
    out.iterations = k + 1;
    if (stop_early) {
      const double change = (out.v - v_prev).cwiseAbs().maxCoeff();
      const double scale = std::max(v_prev.cwiseAbs().maxCoeff(), kDivisionGuard);
      if (change / scale < opts.tol) {
        out.converged = true;
        break;
      }
    }
  }
  out.p = out.v.cwiseProduct(out.v);
  return out;
}

}  // namespace

void SolveOptions::validate() const {
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw InvalidArgument("tol must be >= 0");
  if (!(p_max > 0.0)) throw InvalidArgument("p_max must be > 0");
  if (!(noise_std > 0.0)) throw InvalidArgument("noise_std must be > 0");
}

Vec mse(const Vec& u, const Vec& v, const ChannelState& h, double noise_std) {
  const Eigen::Index m = h.m();
  check_len(u, m, "u");
  check_len(v, m, "v");
  const Vec interference = h.interference_squared() * v.cwiseProduct(v);
  const double noise = noise_std * noise_std;
  Vec e(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double miss = 1.0 - u(i) * h.direct()(i) * v(i);
    e(i) = miss * miss + noise * u(i) * u(i) + u(i) * u(i) * interference(i);
  }
  return e;
}

double mse_objective(const Vec& w, const Vec& u, const Vec& v, const ChannelState& h, double noise_std) {
  check_len(w, h.m(), "w");
  if ((w.array() <= 0.0).any()) throw DomainError("mse_objective requires w > 0");
  const Vec e = mse(u, v, h, noise_std);
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) total += w(i) * e(i) - std::log(w(i));
  return total;
}

Vec update_u(const Vec& v, const ChannelState& h, double noise_std) {
  const Eigen::Index m = h.m();
  check_len(v, m, "v");
  const Vec received = h.squared() * v.cwiseProduct(v);
  const double noise = noise_std * noise_std;
  Vec u(m);
  for (Eigen::Index i = 0; i < m; ++i) u(i) = h.direct()(i) * v(i) / (noise + received(i));
  return u;
}

namespace {

Vec weights_from_fraction(Vec z, const Vec& a, const Vec& b, const UtilityKind& kind) {
  Vec w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) <= kDivisionGuard) {
      if (g_guard_clamps.fetch_add(1, std::memory_order_relaxed) == 0) {
        std::cerr << "warning: w-update argument " << z(i) << " clamped to " << kDivisionGuard << '\n';
      }
      z(i) = kDivisionGuard;
    }
    w(i) = kind.gamma_prime(i, z(i)) * a(i) + b(i);
  }
  return w;
}

}  // namespace

Vec update_w(const Vec& u, const Vec& v, const ChannelState& h, const Vec& a, const Vec& b,
             const UtilityKind& kind) {
  const Eigen::Index m = h.m();
  check_len(u, m, "u");
  check_len(v, m, "v");
  check_len(a, m, "a");
  check_len(b, m, "b");
  Vec z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = 1.0 - u(i) * h.direct()(i) * v(i);
  return weights_from_fraction(std::move(z), a, b, kind);
}

Vec residual_fraction(const Vec& v, const ChannelState& h, double noise_std) {
  check_len(v, h.m(), "v");
  const Vec v2 = v.cwiseProduct(v);
  const double noise = noise_std * noise_std;
  const Vec total = (h.squared() * v2).array() + noise;
  const Vec other = (h.interference_squared() * v2).array() + noise;
  return other.cwiseQuotient(total);
}

ReceiverStep update_uw(const Vec& v, const ChannelState& h, double noise_std, const Vec& a, const Vec& b,
                       const UtilityKind& kind) {
  const Eigen::Index m = h.m();
  check_len(a, m, "a");
  check_len(b, m, "b");
  ReceiverStep out;
  out.u = update_u(v, h, noise_std);
  out.w = weights_from_fraction(residual_fraction(v, h, noise_std), a, b, kind);
  return out;
}

Vec update_v(const Vec& u, const Vec& w, const ChannelState& h, double p_max) {
  const Eigen::Index m = h.m();
  check_len(u, m, "u");
  check_len(w, m, "w");
  const double v_max = std::sqrt(p_max);
  // denominator_i = sum_j h_ji^2 u_j^2 w_j, i.e. column i of the squared gains.
  const Vec denominator = h.squared().transpose() * u.cwiseProduct(u).cwiseProduct(w);
  Vec v(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double raw = u(i) * h.direct()(i) * w(i) / std::max(denominator(i), kDivisionGuard);
    v(i) = std::clamp(raw, 0.0, v_max);
  }
  return v;
}

SolveResult solve(const ChannelState& h, const SolveOptions& opts) {
  return run(h, opts, opts.max_iter, true);
}

SolveResult solve_truncated(const ChannelState& h, const SolveOptions& opts, int k) {
  if (k < 1) throw InvalidArgument("solve_truncated: K must be >= 1");
  return run(h, opts, k, false);
}

std::size_t guard_clamp_count() noexcept { return g_guard_clamps.load(std::memory_order_relaxed); }

}  // namespace uwmmse::wmmse
