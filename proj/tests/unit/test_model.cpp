#include "support.hpp"

#include <uwmmse/model.hpp>
#include <uwmmse/train.hpp>
#include <uwmmse/wmmse.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace uwmmse::model {
namespace {

ProblemConfig problem(double sigma) {
  ProblemConfig c;
  c.noise_std = sigma;
  return c;
}

TEST(InitParams, DeterministicWithDefaultShape) {
  const auto a = init_params(5, 4, 1, 4);
  const auto b = init_params(5, 4, 1, 4);
  EXPECT_EQ(a.depth(), 4);
  ASSERT_EQ(a.tensors().size(), b.tensors().size());
  for (std::size_t k = 0; k < a.tensors().size(); ++k) EXPECT_EQ(*a.tensors()[k], *b.tensors()[k]);
  const auto& g = std::get<GcnParams>(a.layers[0].theta_a);
  EXPECT_EQ(g.w11.rows(), 1);
  EXPECT_EQ(g.w11.cols(), 4);
  EXPECT_EQ(g.w22.rows(), 4);
  // 2 GCNs per layer, each 2 F' F + 2 F weights.
  EXPECT_EQ(a.parameter_count(), 4u * 2u * (2u * 4u + 2u * 4u));
  EXPECT_NE(*init_params(6, 4, 1, 4).tensors()[0], *a.tensors()[0]);
}

TEST(InitParams, CoversSweepGrids) {
  for (int k = 2; k <= 7; ++k) EXPECT_EQ(init_params(1, 4, 1, k).depth(), k);
  for (int f : {2, 5, 10, 15}) EXPECT_EQ(std::get<GcnParams>(init_params(1, f, 1, 4).layers[0].theta_b).w21.rows(), f);
  const auto r = init_params(1, 4, 1, 3, PsiVariant::Regnn);
  EXPECT_EQ(std::get<RegnnParams>(r.layers[0].theta_a).taps.size(), 3u);
  EXPECT_EQ(std::get<RegnnParams>(r.layers[0].theta_a).taps[0].rows(), 3);
}

TEST(PsiGcn, ZeroChannelOrZeroWeightsGiveHalf) {
  const auto theta = std::get<GcnParams>(init_params(2, 4, 1, 1).layers[0].theta_a);
  const Mat q = default_features(5);
  // The channel type rejects a zero diagonal, so the zero matrix is checked
  // through the zero-weight route and a tiny channel.
  GcnParams zero = theta;
  for (Mat* w : {&zero.w11, &zero.w12, &zero.w21, &zero.w22}) w->setZero();
  const ChannelState h = testing::random_channel(5, 1);
  EXPECT_TRUE((psi_gcn(h, q, zero).array() == 0.5).all());
  const ChannelState tiny(Mat::Constant(5, 5, 1e-300));
  EXPECT_LT((psi_gcn(tiny, q, theta).array() - 0.5).abs().maxCoeff(), 1e-15);
}

TEST(PsiRegnn, ZeroTapsGiveHalf) {
  RegnnParams r;
  r.taps.push_back(Mat::Zero(3, 1));
  const ChannelState h = testing::random_channel(4, 2);
  EXPECT_TRUE((psi_regnn(h, default_features(4), r).array() == 0.5).all());
}

TEST(Psi, ShapeErrors) {
  const auto theta = init_params(2, 4, 1, 1);
  const ChannelState h = testing::random_channel(4, 2);
  EXPECT_THROW(psi(h, default_features(3), theta.layers[0].theta_a), ShapeError);
  EXPECT_THROW(psi(h, Mat::Ones(4, 2), theta.layers[0].theta_a), ShapeError);
}

TEST(Psi, PermutationEquivariantBothVariants) {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const ChannelState h = testing::random_channel(12, s);
    const Mat q = testing::random_matrix(12, 2, s + 50);
    const auto perm = testing::random_permutation(12, s + 70);
    for (auto variant : {PsiVariant::Gcn, PsiVariant::Regnn}) {
      const auto theta = init_params(s, 4, 2, 1, variant);
      const Vec lhs = psi(h.permuted(perm), permute_rows(q, perm), theta.layers[0].theta_a);
      const Vec rhs = permute_vector(psi(h, q, theta.layers[0].theta_a), perm);
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Forward, OverrideReducesToTruncatedWmmse) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (double sigma : {2.6e-5, 1.0}) {
      const ChannelState h = testing::random_channel(20, s);
      wmmse::SolveOptions o;
      o.noise_std = sigma;
      const Vec tr = wmmse::solve_truncated(h, o, 4).p;
      const Vec ov = forward_override(h, Vec::Ones(20), Vec::Zero(20), 4, problem(sigma)).p;
      EXPECT_LT((tr - ov).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Forward, LongOverrideMatchesConvergedSolve) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const ChannelState h = testing::random_channel(8, s);
    wmmse::SolveOptions o;
    o.max_iter = 200;
    o.tol = 0.0;
    const Vec full = wmmse::solve(h, o).p;
    const Vec ov = forward_override(h, Vec::Ones(8), Vec::Zero(8), 200, problem(1.0)).p;
    EXPECT_LT((full - ov).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Forward, OutputsStayInRange) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const ChannelState h = testing::random_channel(10, s);
    ProblemConfig cfg = problem(0.01);
    cfg.p_max = 2.0;
    const auto out = forward(h, default_features(10), init_params(s, 4, 1, 4), cfg);
    EXPECT_GE(out.p.minCoeff(), 0.0);
    EXPECT_LE(out.p.maxCoeff(), 2.0 + 1e-12);
    // sigmoid saturates to exactly 0 or 1 in double precision
    for (const auto& l : out.trace.layers) {
      EXPECT_GE(l.a.minCoeff(), 0.0);
      EXPECT_LE(l.a.maxCoeff(), 1.0);
      EXPECT_GE(l.b.minCoeff(), 0.0);
      EXPECT_LE(l.b.maxCoeff(), 1.0);
      EXPECT_LE(l.v.maxCoeff(), std::sqrt(2.0));
    }
  }
}

TEST(Forward, PermutationEquivariant) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const ChannelState h = testing::random_channel(10, s);
    const Mat q = testing::random_matrix(10, 1, s + 3);
    const auto perm = testing::random_permutation(10, s + 9);
    for (auto variant : {PsiVariant::Gcn, PsiVariant::Regnn}) {
      const auto theta = init_params(s, 4, 1, 4, variant);
      const Vec lhs = forward(h.permuted(perm), permute_rows(q, perm), theta, problem(0.1)).p;
      const Vec rhs = permute_vector(forward(h, q, theta, problem(0.1)).p, perm);
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(Forward, RejectsEmptyModelAndBadDepth) {
  const ChannelState h = testing::random_channel(3, 1);
  EXPECT_THROW(forward(h, default_features(3), ModelParams{}, problem(1.0)), InvalidArgument);
  EXPECT_THROW(forward_override(h, Vec::Ones(3), Vec::Zero(3), 0, problem(1.0)), InvalidArgument);
}

TEST(ForwardTape, MatchesPlainForward) {
  for (auto variant : {PsiVariant::Gcn, PsiVariant::Regnn}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const ChannelState h = testing::random_channel(9, s);
      const Mat q = testing::random_matrix(9, 2, s);
      const auto theta = init_params(s, 3, 2, 3, variant);
      const ProblemConfig cfg = problem(0.05);
      grad::Tape tape;
      const auto ch = bind_channel(tape, h, q, cfg.noise_std, theta.regnn_taps);
      const auto out = forward_tape(ch, bind_params(tape, theta), theta, cfg);
      const Vec plain = forward(h, q, theta, cfg).p;
      EXPECT_LT((out.p.value() - plain).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

grad::FdResult full_loss_check(const ChannelState& h, const ModelParams& theta, const ProblemConfig& cfg,
                               std::uint64_t seed) {
  const std::vector<train::Sample> batch{{h, default_features(h.m())}};
  const grad::TapeFunction f = [&](grad::Tape& tape, const std::vector<grad::Var>& leaves) {
    return train::batch_loss(tape, split_params(theta, leaves), theta, batch, cfg);
  };
  std::vector<Mat> flat;
  for (const Mat* t : theta.tensors()) flat.push_back(*t);
  grad::FdOptions opts;
  opts.directions = 20;
  opts.seed = seed;
  return grad::finite_diff_check(f, flat, opts);
}

TEST(ForwardTape, FullLossGradientMatchesFiniteDifferences) {
  int conclusive = 0;
  for (std::uint64_t s = 0; s < 10 && conclusive < 3; ++s) {
    const ChannelState h = testing::random_channel(8, s);
    const auto theta = init_params(s, 4, 1, 3);
    const auto r = full_loss_check(h, theta, problem(1.0), s);
    if (!r.conclusive) continue;
    ++conclusive;
    EXPECT_LT(r.max_rel_error, 1e-5) << "seed " << s;
  }
  EXPECT_GE(conclusive, 1);
}

TEST(ForwardTape, SquaredRateLossGradient) {
  ProblemConfig cfg = problem(1.0);
  cfg.utility = UtilityKind::sum_squared_rate();
  const auto theta = init_params(3, 3, 1, 2, PsiVariant::Regnn);
  const auto r = full_loss_check(testing::random_channel(5, 3), theta, cfg, 4);
  if (r.conclusive) {
    EXPECT_LT(r.max_rel_error, 1e-5);
  }
}

wmmse::SolveResult converged_solve(const ChannelState& h) {
  wmmse::SolveOptions o;
  o.max_iter = 5000;
  o.tol = 1e-12;
  auto r = wmmse::solve(h, o);
  EXPECT_TRUE(r.converged);
  return r;
}

TEST(Theorem1Residual, ZeroWhenBIsZero) {
  const ChannelState h = testing::random_channel(10, 4);
  const auto fixed = converged_solve(h);
  const auto tr = forward_override(h, Vec::Ones(10), Vec::Zero(10), 3, problem(1.0)).trace;
  for (const Vec& r : theorem1_residual(tr, fixed, h)) EXPECT_EQ(r, Vec::Zero(10));
}

TEST(Theorem1Residual, ZeroWhenBEqualsOptimalWeights) {
  const ChannelState h = testing::random_channel(10, 5);
  const auto fixed = converged_solve(h);
  const Vec u = wmmse::update_u(fixed.v, h, 1.0);
  const auto mask = theorem1_included(fixed);
  Vec w_star = Vec::Zero(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    if (mask[static_cast<std::size_t>(i)]) w_star(i) = 1.0 / (u(i) * h.gain(i, i) * fixed.v(i));
  }
  UnfoldTrace tr;
  tr.layers.push_back({Vec::Ones(10), w_star, u, w_star, fixed.v});
  const Vec r = theorem1_residual(tr, fixed, h)[0];
  EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-8 * std::max(1.0, w_star.cwiseAbs().maxCoeff()));
}

TEST(Theorem1Residual, MatchesDirectEvaluation) {
  const ChannelState h = testing::random_channel(6, 7);
  const auto fixed = converged_solve(h);
  const Vec b = testing::random_matrix(6, 1, 2).cwiseAbs();
  UnfoldTrace tr;
  tr.layers.push_back({Vec::Ones(6), b, Vec::Zero(6), Vec::Zero(6), Vec::Zero(6)});
  const Vec r = theorem1_residual(tr, fixed, h)[0];
  const auto mask = theorem1_included(fixed);
  const Vec u = wmmse::update_u(fixed.v, h, 1.0);
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (!mask[static_cast<std::size_t>(i)]) {
      EXPECT_EQ(r(i), 0.0);
      continue;
    }
    const double wi = 1.0 / (u(i) * h.gain(i, i) * fixed.v(i));
    double expected = 0.0;
    for (Eigen::Index j = 0; j < 6; ++j) {
      if (j == i) continue;
      // (u_j)^2 w_j through the closed form 1 / (sigma^2 + sum_l h_jl^2 v_l^2).
      double received = 1.0;
      for (Eigen::Index l = 0; l < 6; ++l) received += h.gain(j, l) * h.gain(j, l) * fixed.v(l) * fixed.v(l);
      expected += h.gain(j, i) * h.gain(j, i) * (u(j) * u(j) * wi * b(j) - b(i) / received);
    }
    EXPECT_NEAR(r(i), expected, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Theorem1Residual, RefusesUnconvergedFixedPoint) {
  const ChannelState h = testing::random_channel(6, 1);
  const auto tr = wmmse::solve_truncated(h, wmmse::SolveOptions{}, 2);
  const auto trace = forward_override(h, Vec::Ones(6), Vec::Zero(6), 2, problem(1.0)).trace;
  EXPECT_THROW(theorem1_residual(trace, tr, h), InvalidArgument);
}

}  // namespace
}  // namespace uwmmse::model
