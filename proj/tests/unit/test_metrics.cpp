#include "support.hpp"

#include <uwmmse/metrics.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace uwmmse {
namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

TEST(Rates, ZeroPowerGivesZeroRate) {
  const ChannelState h = testing::random_gains(4, 1);
  EXPECT_EQ(rates(Vec::Zero(4), h, 1.0), Vec::Zero(4));
}

TEST(Rates, HandValues) {
  EXPECT_DOUBLE_EQ(rates(vec({1.0}), ChannelState(Mat::Ones(1, 1)), 1.0)(0), 1.0);
  const Vec c = rates(vec({1.0, 1.0}), ChannelState(Mat::Ones(2, 2)), 1.0);
  EXPECT_NEAR(c(0), std::log2(1.5), 1e-15);
  EXPECT_NEAR(c(1), 0.58496, 5e-6);
}

TEST(Rates, MatchesIndependentFormula) {
  const ChannelState h = testing::random_channel(7, 4);
  const Vec p = testing::random_matrix(7, 1, 5).cwiseAbs();
  const Vec c = rates(p, h, 0.3);
  for (Eigen::Index i = 0; i < 7; ++i) {
    double interference = 0.09;
    for (Eigen::Index j = 0; j < 7; ++j) {
      if (j != i) interference += h.gain(i, j) * h.gain(i, j) * p(j);
    }
    EXPECT_NEAR(c(i), std::log2(1.0 + h.gain(i, i) * h.gain(i, i) * p(i) / interference), 1e-12);
  }
}

TEST(Rates, MonotoneInOwnPowerAntitoneInOthers) {
  const ChannelState h = testing::random_gains(5, 8);
  const Vec p = Vec::Constant(5, 0.4);
  const Vec base = rates(p, h, 0.5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    Vec q = p;
    q(i) += 0.3;
    const Vec c = rates(q, h, 0.5);
    for (Eigen::Index j = 0; j < 5; ++j) {
      if (j == i) {
        EXPECT_GE(c(j), base(j));
      } else {
        EXPECT_LE(c(j), base(j));
      }
    }
  }
}

TEST(SumUtility, Examples) {
  EXPECT_DOUBLE_EQ(sum_utility(vec({1, 2}), UtilityKind::sum_rate()), 3.0);
  EXPECT_DOUBLE_EQ(sum_utility(vec({1, 2}), UtilityKind::sum_squared_rate()), 5.0);
  EXPECT_DOUBLE_EQ(sum_utility(vec({1, 1}), UtilityKind::weighted_sum_rate({2.0, 1.0})), 3.0);
}

TEST(SumUtility, PermutationBehaviour) {
  const Vec c = vec({0.5, 1.5, 2.5});
  const Vec cp = vec({2.5, 0.5, 1.5});
  EXPECT_DOUBLE_EQ(sum_utility(c, UtilityKind::sum_rate()), sum_utility(cp, UtilityKind::sum_rate()));
  EXPECT_DOUBLE_EQ(sum_utility(c, UtilityKind::weighted_sum_rate({1, 2, 3})),
                   sum_utility(cp, UtilityKind::weighted_sum_rate({3, 1, 2})));
}

TEST(SumUtility, LogRateFloorsZero) {
  EXPECT_DOUBLE_EQ(sum_utility(vec({0.0}), UtilityKind::log_rate()), std::log(kLogRateFloor));
}

TEST(SumUtility, HarmonicAtZeroRateIsDomainError) {
  EXPECT_THROW(sum_utility(vec({0.0, 1.0}), UtilityKind::harmonic_rate()), DomainError);
}

TEST(GammaPrime, Examples) {
  EXPECT_DOUBLE_EQ(gamma_prime(UtilityKind::sum_rate(), 0.5), 2.0);
  EXPECT_DOUBLE_EQ(gamma_prime(UtilityKind::sum_squared_rate(), 1.0), 0.0);
  EXPECT_NEAR(gamma_prime(UtilityKind::sum_squared_rate(), std::exp(-1.0)), 2.0 * std::exp(1.0), 1e-12);
  EXPECT_NEAR(gamma_prime(UtilityKind::sum_squared_rate(), std::exp(-1.0)), 5.43656, 5e-6);
  EXPECT_THROW(gamma_prime(UtilityKind::sum_rate(), 0.0), DomainError);
  EXPECT_THROW(gamma_prime(UtilityKind::sum_rate(), -1.0), DomainError);
}

TEST(GammaPrime, MatchesDerivativeOfGamma) {
  for (const auto& kind : {UtilityKind::sum_rate(), UtilityKind::sum_squared_rate(), UtilityKind::log_rate(),
                           UtilityKind::harmonic_rate()}) {
    for (double z : {0.05, 0.3, 0.7, 0.95}) {
      const double h = 1e-6;
      const double fd = (kind.gamma(0, z + h) - kind.gamma(0, z - h)) / (2 * h);
      EXPECT_NEAR(kind.gamma_prime(0, z), fd, 1e-5 * std::max(1.0, std::abs(fd))) << kind.name() << " z=" << z;
    }
  }
}

TEST(UtilityKind, ConcavityDecidesSolverSupport) {
  EXPECT_TRUE(UtilityKind::sum_rate().solver_enabled());
  EXPECT_TRUE(UtilityKind::weighted_sum_rate({1.0, 2.0}).solver_enabled());
  EXPECT_TRUE(UtilityKind::sum_squared_rate().solver_enabled());
  EXPECT_FALSE(UtilityKind::log_rate().solver_enabled());
  EXPECT_FALSE(UtilityKind::harmonic_rate().solver_enabled());
  EXPECT_THROW(UtilityKind::log_rate().require_solver_support(3), InvalidArgument);
  EXPECT_THROW(UtilityKind::weighted_sum_rate({1.0, 2.0}).require_solver_support(3), ShapeError);
}

TEST(UtilityKind, SecondDifferencesOfEnabledGammasAreNonPositive) {
  for (const auto& kind : {UtilityKind::sum_rate(), UtilityKind::sum_squared_rate()}) {
    std::vector<double> z;
    for (int k = 0; k <= 240; ++k) z.push_back(std::pow(10.0, -6.0 + 6.0 * k / 240.0));
    for (std::size_t k = 1; k + 1 < z.size(); ++k) {
      const double s1 = (kind.gamma(0, z[k]) - kind.gamma(0, z[k - 1])) / (z[k] - z[k - 1]);
      const double s2 = (kind.gamma(0, z[k + 1]) - kind.gamma(0, z[k])) / (z[k + 1] - z[k]);
      EXPECT_LE(s2 - s1, 1e-9 * std::max(std::abs(s1), std::abs(s2))) << kind.name();
    }
  }
}

TEST(UtilityKind, FromName) {
  EXPECT_EQ(UtilityKind::from_name("sum_rate").tag(), UtilityTag::SumRate);
  EXPECT_EQ(UtilityKind::from_name("sum_squared_rate").tag(), UtilityTag::SumSquaredRate);
  EXPECT_EQ(UtilityKind::from_name("log_rate").tag(), UtilityTag::LogRate);
  EXPECT_EQ(UtilityKind::from_name("harmonic_rate").tag(), UtilityTag::HarmonicRate);
  EXPECT_EQ(UtilityKind::from_name("weighted_sum_rate", {1.0}).tag(), UtilityTag::WeightedSumRate);
  EXPECT_THROW(UtilityKind::from_name("max_min"), InvalidArgument);
  EXPECT_THROW(UtilityKind::weighted_sum_rate({1.0, -2.0}), InvalidArgument);
}

// The natural-log objective and the log2 objective share their argmax.
TEST(Rates, LogBaseDoesNotMoveGridArgmax) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ChannelState h = testing::random_gains(2, seed);
    double best2 = -1.0;
    double beste = -1.0;
    int arg2 = -1;
    int arge = -1;
    for (int a = 0; a <= 20; ++a) {
      for (int b = 0; b <= 20; ++b) {
        const Vec p = vec({a / 20.0, b / 20.0});
        const double s2 = rates(p, h, 1.0).sum();
        const double se = s2 * std::log(2.0);
        if (s2 > best2) {
          best2 = s2;
          arg2 = a * 21 + b;
        }
        if (se > beste) {
          beste = se;
          arge = a * 21 + b;
        }
      }
    }
    EXPECT_EQ(arg2, arge);
  }
}

TEST(ProblemConfig, ValidatesAndSelectsUpdateUtility) {
  ProblemConfig cfg;
  cfg.utility = UtilityKind::sum_squared_rate();
  EXPECT_EQ(cfg.update_utility().tag(), UtilityTag::SumSquaredRate);
  cfg.modified_w_update = false;
  EXPECT_EQ(cfg.update_utility().tag(), UtilityTag::SumRate);
  cfg.noise_std = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

}  // namespace
}  // namespace uwmmse
