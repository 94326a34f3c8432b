#include "uwmmse/grad.hpp"
#include "uwmmse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uwmmse::grad {

namespace {

struct Evaluation {
  double value = 0.0;
  KinkReport kinks;
  GradientMap gradient;
};

Evaluation evaluate(const TapeFunction& f, const std::vector<Mat>& theta, bool with_gradient) {
  Tape tape;
  std::vector<Var> params;
  params.reserve(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) params.push_back(tape.parameter(static_cast<int>(k), theta[k]));
  const Var out = f(tape, params);
  Evaluation e;
  e.value = out.scalar();
  e.kinks = tape.kinks();
  if (with_gradient) e.gradient = tape.backward(out);
  return e;
}

double directional(const GradientMap& grad, const std::vector<Mat>& direction) {
  double total = 0.0;
  for (std::size_t k = 0; k < direction.size(); ++k) {
    const auto it = grad.find(static_cast<int>(k));
    if (it != grad.end()) total += it->second.cwiseProduct(direction[k]).sum();
  }
  return total;
}

std::vector<Mat> shifted(const std::vector<Mat>& theta, const std::vector<Mat>& direction, double step) {
  std::vector<Mat> out = theta;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += step * direction[k];
  return out;
}

}  // namespace

FdResult finite_diff_check(const TapeFunction& f, const std::vector<Mat>& theta, const FdOptions& opts) {
  if (!(opts.h > 0.0)) throw InvalidArgument("finite_diff_check: h must be > 0");
  if (!(opts.resolution > 0.0)) throw InvalidArgument("finite_diff_check: resolution must be > 0");
  if (opts.directions < 0) throw InvalidArgument("finite_diff_check: directions must be >= 0");

  const Evaluation base = evaluate(f, theta, true);
  FdResult result;
  result.min_kink_distance = base.kinks.min_distance;
  if (base.kinks.min_distance <= 1e3 * opts.h) result.conclusive = false;

  std::vector<std::vector<Mat>> directions;
  if (opts.directions == 0) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
      for (Eigen::Index c = 0; c < theta[k].size(); ++c) {
        std::vector<Mat> d;
        for (const Mat& t : theta) d.push_back(Mat::Zero(t.rows(), t.cols()));
        d[k](c) = 1.0;
        directions.push_back(std::move(d));
      }
    }
  } else {
    Rng rng(opts.seed);
    for (int n = 0; n < opts.directions; ++n) {
      std::vector<Mat> d;
      double norm2 = 0.0;
      for (const Mat& t : theta) {
        Mat r(t.rows(), t.cols());
        // Box-Muller normals give an isotropic direction after normalization.
        for (Eigen::Index c = 0; c < r.size(); ++c) {
          r(c) = std::sqrt(-2.0 * std::log(rng.uniform01_open_closed())) *
                 std::cos(2.0 * 3.14159265358979323846 * rng.uniform01());
        }
        norm2 += r.squaredNorm();
        d.push_back(std::move(r));
      }
      const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
      for (Mat& r : d) r *= inv;
      directions.push_back(std::move(d));
    }
  }

  for (const auto& d : directions) {
    const Evaluation plus = evaluate(f, shifted(theta, d, opts.h), false);
    const Evaluation minus = evaluate(f, shifted(theta, d, -opts.h), false);
    if (plus.kinks.signature != base.kinks.signature || minus.kinks.signature != base.kinks.signature) {
      result.conclusive = false;
    }
    const double numeric = (plus.value - minus.value) / (2.0 * opts.h);
    const double analytic = directional(base.gradient, d);
    const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), 1e-8);
    // Allow a few ulps of accumulated error in each evaluation of f.
    const double roundoff = 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(plus.value), std::abs(minus.value)) / (2.0 * opts.h);
    const double roundoff_rel = roundoff / std::max(std::abs(analytic), 1e-300);
    result.max_roundoff = std::max(result.max_roundoff, roundoff_rel);
    if (roundoff_rel > opts.resolution) result.conclusive = false;
    result.max_rel_error = std::max(result.max_rel_error, rel);
    ++result.checks;
  }
  return result;
}

}  // namespace uwmmse::grad
