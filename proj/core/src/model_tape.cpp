#include "uwmmse/model.hpp"

#include <cmath>
#include <limits>

namespace uwmmse::model {

using grad::Tape;
using grad::Var;

namespace {

std::size_t psi_tensor_count(const ModelParams& shape) {
  return shape.variant == PsiVariant::Gcn ? 4 : static_cast<std::size_t>(shape.regnn_layers);
}

Var gcn_tape(const TapeChannel& ch, const std::vector<Var>& theta) {
  const Var& w11 = theta[0];
  const Var& w12 = theta[1];
  const Var& w21 = theta[2];
  const Var& w22 = theta[3];
  const Var z = relu(matmul(ch.diag, matmul(ch.features, w11)) + matmul(ch.gains, matmul(ch.features, w12)));
  return sigmoid(matmul(ch.diag, matmul(z, w21)) + matmul(ch.gains, matmul(z, w22)));
}

Var regnn_tape(const TapeChannel& ch, const std::vector<Var>& theta) {
  Tape& tape = *ch.gains.tape();
  Var z = tape.constant(ch.features.value().col(0));
  for (std::size_t l = 0; l < theta.size(); ++l) {
    const Var& nu = theta[l];
    const auto taps = static_cast<std::size_t>(nu.rows());
    if (taps > ch.regnn_selectors.size()) throw ShapeError("REGNN tap count exceeds bound selectors");
    Var shifted = z;
    Var acc = matmul(z, dot(nu, ch.regnn_selectors[0]));
    for (std::size_t k = 1; k < taps; ++k) {
      shifted = matmul(ch.gains, shifted);
      acc = acc + matmul(shifted, dot(nu, ch.regnn_selectors[k]));
    }
    z = l + 1 == theta.size() ? sigmoid(acc) : relu(acc);
  }
  return z;
}

// gamma'(z) a + b for the solver-enabled utilities.
Var weight_update(const TapeChannel& ch, Var z, Var a, Var b, const UtilityKind& kind) {
  Tape& tape = *z.tape();
  switch (kind.tag()) {
    case UtilityTag::SumRate:
      return a / z + b;
    case UtilityTag::WeightedSumRate: {
      Mat alpha(ch.m, 1);
      for (Eigen::Index i = 0; i < ch.m; ++i) alpha(i) = kind.weight(i);
      return (a * tape.constant(std::move(alpha))) / z + b;
    }
    case UtilityTag::SumSquaredRate:
      return (-2.0 * log(z)) / z * a + b;
    default:
      throw InvalidArgument("utility '" + std::string(kind.name()) + "' cannot drive the w-update");
  }
}

}  // namespace

TapeChannel bind_channel(Tape& tape, const ChannelState& h, const Mat& q, double noise_std, int regnn_taps) {
  if (q.rows() != h.m()) throw ShapeError("node features must have one row per node");
  TapeChannel ch;
  ch.m = h.m();
  ch.gains = tape.constant(h.gains());
  ch.diag = tape.constant(Mat(h.direct().asDiagonal()));
  ch.squared = tape.constant(h.squared());
  ch.squared_t = tape.constant(h.squared().transpose());
  ch.interference = tape.constant(h.interference_squared());
  ch.direct = tape.constant(h.direct());
  ch.direct_sq = tape.constant(h.direct().cwiseProduct(h.direct()));
  ch.noise_var = tape.constant(Mat::Constant(h.m(), 1, noise_std * noise_std));
  ch.ones = tape.constant(Mat::Ones(h.m(), 1));
  ch.features = tape.constant(q);
  for (int k = 0; k <= regnn_taps; ++k) {
    Mat e = Mat::Zero(regnn_taps + 1, 1);
    e(k) = 1.0;
    ch.regnn_selectors.push_back(tape.constant(std::move(e)));
  }
  return ch;
}

TapeParams split_params(const ModelParams& shape, const std::vector<Var>& leaves) {
  const std::size_t per_psi = psi_tensor_count(shape);
  if (leaves.size() != 2 * per_psi * shape.layers.size()) throw ShapeError("parameter leaf count mismatch");
  TapeParams out;
  auto it = leaves.begin();
  for (std::size_t k = 0; k < shape.layers.size(); ++k) {
    out.a.emplace_back(it, it + static_cast<std::ptrdiff_t>(per_psi));
    it += static_cast<std::ptrdiff_t>(per_psi);
    out.b.emplace_back(it, it + static_cast<std::ptrdiff_t>(per_psi));
    it += static_cast<std::ptrdiff_t>(per_psi);
  }
  return out;
}

TapeParams bind_params(Tape& tape, const ModelParams& theta) {
  std::vector<Var> leaves;
  int id = 0;
  for (const Mat* t : theta.tensors()) leaves.push_back(tape.parameter(id++, *t));
  return split_params(theta, leaves);
}

Var psi_tape(const TapeChannel& ch, const std::vector<Var>& theta, const ModelParams& shape) {
  if (shape.variant == PsiVariant::Gcn) {
    if (theta.size() != 4) throw ShapeError("GCN expects four weight arrays");
    return gcn_tape(ch, theta);
  }
  return regnn_tape(ch, theta);
}

TapeForward forward_tape(const TapeChannel& ch, const TapeParams& params, const ModelParams& shape,
                         const ProblemConfig& cfg) {
  cfg.validate();
  const UtilityKind kind = cfg.update_utility();
  kind.require_solver_support(ch.m);
  Tape& tape = *ch.gains.tape();
  const double v_max = std::sqrt(cfg.p_max);
  const double inf = std::numeric_limits<double>::infinity();

  TapeForward out;
  Var v = tape.constant(Mat::Constant(ch.m, 1, v_max));
  for (std::size_t k = 0; k < params.a.size(); ++k) {
    const Var a = psi_tape(ch, params.a[k], shape);
    const Var b = psi_tape(ch, params.b[k], shape);
    const Var v2 = square(v);
    const Var total = ch.noise_var + matmul(ch.squared, v2);
    const Var u = (ch.direct * v) / total;
    const Var z = saturate((ch.noise_var + matmul(ch.interference, v2)) / total, kDivisionGuard, inf);
    const Var w = weight_update(ch, z, a, b, kind);
    const Var num = u * ch.direct * w;
    const Var den = matmul(ch.squared_t, square(u) * w);
    v = saturate(num / den, 0.0, v_max);
    out.a.push_back(a);
    out.b.push_back(b);
    out.v.push_back(v);
  }
  out.p = square(v);
  return out;
}

Var rates_tape(const TapeChannel& ch, Var p) {
  const Var sinr = (ch.direct_sq * p) / (ch.noise_var + matmul(ch.interference, p));
  return (1.0 / std::log(2.0)) * log(ch.ones + sinr);
}

Var sum_utility_tape(const TapeChannel& ch, Var c, const UtilityKind& kind) {
  Tape& tape = *c.tape();
  switch (kind.tag()) {
    case UtilityTag::SumRate:
      return sum(c);
    case UtilityTag::WeightedSumRate: {
      Mat alpha(ch.m, 1);
      for (Eigen::Index i = 0; i < ch.m; ++i) alpha(i) = kind.weight(i);
      return dot(c, tape.constant(std::move(alpha)));
    }
    case UtilityTag::SumSquaredRate:
      return sum(square(c));
    case UtilityTag::LogRate:
      return sum(log(saturate(c, kLogRateFloor, std::numeric_limits<double>::infinity())));
    case UtilityTag::HarmonicRate:
      return -1.0 * sum(ch.ones / c);
  }
  return sum(c);
}

}  // namespace uwmmse::model
