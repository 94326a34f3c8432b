#include "uwmmse/model.hpp"

#include "uwmmse/rng.hpp"

#include <cmath>
#include <string>

namespace uwmmse::model {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Mat glorot(Rng& rng, Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
  const double s = std::sqrt(6.0 / (fan_in + fan_out));
  Mat out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.uniform(-s, s);
  }
  return out;
}

PsiParams init_psi(Rng& rng, const ModelParams& shape) {
  if (shape.variant == PsiVariant::Gcn) {
    const auto f_in = static_cast<double>(shape.features);
    const auto f = static_cast<double>(shape.hidden);
    GcnParams g;
    g.w11 = glorot(rng, shape.features, shape.hidden, f_in, f);
    g.w12 = glorot(rng, shape.features, shape.hidden, f_in, f);
    g.w21 = glorot(rng, shape.hidden, 1, f, 1.0);
    g.w22 = glorot(rng, shape.hidden, 1, f, 1.0);
    return g;
  }
  RegnnParams r;
  const auto taps = static_cast<double>(shape.regnn_taps + 1);
  for (int l = 0; l < shape.regnn_layers; ++l) r.taps.push_back(glorot(rng, shape.regnn_taps + 1, 1, taps, 1.0));
  return r;
}

void check_features(const ChannelState& h, const Mat& q) {
  if (q.rows() != h.m()) throw ShapeError("node features must have one row per node");
  if (q.cols() < 1) throw ShapeError("node features need at least one column");
}

template <class Visit>
void visit_psi(PsiParams& p, Visit&& fn) {
  if (auto* g = std::get_if<GcnParams>(&p)) {
    fn(g->w11);
    fn(g->w12);
    fn(g->w21);
    fn(g->w22);
  } else {
    for (Mat& t : std::get<RegnnParams>(p).taps) fn(t);
  }
}

ForwardResult unfold(const ChannelState& h, const Mat* q, const ModelParams* theta, const Vec* a_fixed,
                     const Vec* b_fixed, int depth, const ProblemConfig& cfg) {
  cfg.validate();
  const UtilityKind kind = cfg.update_utility();
  kind.require_solver_support(h.m());

  ForwardResult out;
  out.trace.v0 = Vec::Constant(h.m(), std::sqrt(cfg.p_max));
  Vec v = out.trace.v0;
  out.trace.layers.reserve(static_cast<std::size_t>(depth));
  for (int k = 0; k < depth; ++k) {
    LayerTrace layer;
    if (theta != nullptr) {
      const auto& lp = theta->layers[static_cast<std::size_t>(k)];
      layer.a = psi(h, *q, lp.theta_a);
      layer.b = psi(h, *q, lp.theta_b);
    } else {
      layer.a = *a_fixed;
      layer.b = *b_fixed;
    }
    auto step = wmmse::update_uw(v, h, cfg.noise_std, layer.a, layer.b, kind);
    layer.u = std::move(step.u);
    layer.w = std::move(step.w);
    layer.v = wmmse::update_v(layer.u, layer.w, h, cfg.p_max);
    v = layer.v;
    out.trace.layers.push_back(std::move(layer));
  }
  out.p = v.cwiseProduct(v);
  return out;
}

}  // namespace

std::string_view to_string(PsiVariant v) noexcept { return v == PsiVariant::Gcn ? "gcn" : "regnn"; }

PsiVariant psi_variant_from_name(std::string_view name) {
  if (name == "gcn") return PsiVariant::Gcn;
  if (name == "regnn") return PsiVariant::Regnn;
  throw InvalidArgument("unknown psi variant '" + std::string(name) + "'");
}

std::vector<Mat*> ModelParams::tensors() {
  std::vector<Mat*> out;
  for (auto& layer : layers) {
    visit_psi(layer.theta_a, [&](Mat& t) { out.push_back(&t); });
    visit_psi(layer.theta_b, [&](Mat& t) { out.push_back(&t); });
  }
  return out;
}

std::vector<const Mat*> ModelParams::tensors() const {
  std::vector<const Mat*> out;
  for (Mat* t : const_cast<ModelParams*>(this)->tensors()) out.push_back(t);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const Mat* t : tensors()) n += static_cast<std::size_t>(t->size());
  return n;
}

ModelParams init_params(std::uint64_t seed, int hidden, int features, int depth, PsiVariant variant,
                        int regnn_layers, int regnn_taps) {
  if (hidden < 1 || features < 1 || depth < 1) throw InvalidArgument("init_params: F, F' and K must be >= 1");
  if (variant == PsiVariant::Regnn && (regnn_layers < 1 || regnn_taps < 0)) {
    throw InvalidArgument("init_params: REGNN needs >= 1 layer and >= 0 taps");
  }
  ModelParams out;
  out.variant = variant;
  out.hidden = hidden;
  out.features = features;
  out.regnn_layers = regnn_layers;
  out.regnn_taps = regnn_taps;
  out.seed = seed;
  Rng rng(seed);
  for (int k = 0; k < depth; ++k) {
    LayerParams lp;
    lp.theta_a = init_psi(rng, out);
    lp.theta_b = init_psi(rng, out);
    out.layers.push_back(std::move(lp));
  }
  return out;
}

Mat default_features(Eigen::Index m) { return Mat::Ones(m, 1); }

Vec psi_gcn(const ChannelState& h, const Mat& q, const GcnParams& theta) {
  check_features(h, q);
  if (theta.w11.rows() != q.cols() || theta.w12.rows() != q.cols()) {
    throw ShapeError("GCN input weights do not match the feature width");
  }
  const Mat q1 = q * theta.w11;
  const Mat q2 = q * theta.w12;
  const Mat z = (h.direct().asDiagonal() * q1 + h.gains() * q2).cwiseMax(0.0);
  const Vec z1 = z * theta.w21;
  const Vec z2 = z * theta.w22;
  const Vec pre = h.direct().cwiseProduct(z1) + h.gains() * z2;
  return pre.unaryExpr(&sigmoid);
}

Vec psi_regnn(const ChannelState& h, const Mat& q, const RegnnParams& theta) {
  check_features(h, q);
  if (theta.taps.empty()) throw ShapeError("REGNN needs at least one layer");
  Vec z = q.col(0);
  for (std::size_t l = 0; l < theta.taps.size(); ++l) {
    const Mat& nu = theta.taps[l];
    Vec shifted = z;
    Vec acc = nu(0) * z;
    for (Eigen::Index k = 1; k < nu.rows(); ++k) {
      shifted = h.gains() * shifted;
      acc += nu(k) * shifted;
    }
    const bool last = l + 1 == theta.taps.size();
    if (last) {
      z = acc.unaryExpr(&sigmoid);
    } else {
      z = acc.cwiseMax(0.0);
    }
  }
  return z;
}

Vec psi(const ChannelState& h, const Mat& q, const PsiParams& theta) {
  if (const auto* g = std::get_if<GcnParams>(&theta)) return psi_gcn(h, q, *g);
  return psi_regnn(h, q, std::get<RegnnParams>(theta));
}

ForwardResult forward(const ChannelState& h, const Mat& q, const ModelParams& theta, const ProblemConfig& cfg) {
  if (theta.layers.empty()) throw InvalidArgument("model has no layers");
  return unfold(h, &q, &theta, nullptr, nullptr, theta.depth(), cfg);
}

ForwardResult forward_override(const ChannelState& h, const Vec& a, const Vec& b, int depth,
                               const ProblemConfig& cfg) {
  if (depth < 1) throw InvalidArgument("forward_override: K must be >= 1");
  if (a.size() != h.m() || b.size() != h.m()) throw ShapeError("override vectors must have length m");
  return unfold(h, nullptr, nullptr, &a, &b, depth, cfg);
}

std::vector<bool> theorem1_included(const wmmse::SolveResult& fixed_point) {
  constexpr double kEdge = 1e-6;
  const double v_max = std::sqrt(fixed_point.p_max);
  std::vector<bool> mask(static_cast<std::size_t>(fixed_point.v.size()));
  for (Eigen::Index i = 0; i < fixed_point.v.size(); ++i) {
    const double v = fixed_point.v(i);
    mask[static_cast<std::size_t>(i)] = v >= kEdge && v <= v_max - kEdge;
  }
  return mask;
}

std::vector<Vec> theorem1_residual(const UnfoldTrace& trace, const wmmse::SolveResult& fixed_point,
                                   const ChannelState& h) {
  if (!fixed_point.converged) throw InvalidArgument("theorem1_residual needs a converged fixed point");
  const Eigen::Index m = h.m();
  if (fixed_point.v.size() != m) throw ShapeError("fixed point does not match the channel");

  const Vec& v = fixed_point.v;
  const Vec u = wmmse::update_u(v, h, fixed_point.noise_std);
  const Vec received = h.squared() * v.cwiseProduct(v);
  const double noise = fixed_point.noise_std * fixed_point.noise_std;
  const std::vector<bool> included = theorem1_included(fixed_point);

  // (u*_j)^2 w*_j simplifies to 1 / (sigma^2 + sum_l h_jl^2 v_l^2), which stays
  // finite for nodes that are switched off.
  Vec uuw(m);
  Vec w(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    uuw(j) = 1.0 / (noise + received(j));
    w(j) = included[static_cast<std::size_t>(j)] ? 1.0 / (u(j) * h.direct()(j) * v(j)) : 0.0;
  }

  std::vector<Vec> out;
  for (const LayerTrace& layer : trace.layers) {
    if (layer.b.size() != m) throw ShapeError("trace does not match the channel");
    Vec r = Vec::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!included[static_cast<std::size_t>(i)]) continue;
      double acc = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == i) continue;
        const double hji2 = h.squared()(j, i);
        if (included[static_cast<std::size_t>(j)]) {
          acc += hji2 * u(j) * u(j) * (w(i) * layer.b(j) - w(j) * layer.b(i));
        } else {
          acc += hji2 * (u(j) * u(j) * w(i) * layer.b(j) - uuw(j) * layer.b(i));
        }
      }
      r(i) = acc;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace uwmmse::model
