#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "renormlab/renorm.hpp"
#include "renormlab/tune.hpp"

using namespace renormlab;

TEST(Tune, PeriodTwoAnchorIsGolden) {
  const auto r = tune_parameter(2.0, {2});
  EXPECT_NEAR(r.c, (std::sqrt(5.0) - 1.0) / 2.0, 1e-10);
  EXPECT_FALSE(r.extrapolated);
  const auto f = make_affine_family(2.0, r.c);
  EXPECT_NEAR(f(f(0.0)), 0.0, 1e-12);
}

TEST(Tune, DoublingDepthSixMatchesLogisticAccumulation) {
  const auto r = tune_parameter(2.0, {2, 2, 2, 2, 2, 2});
  const double mu_oracle = static_cast<double>(oracle::logistic_accumulation());
  EXPECT_NEAR(r.c * (1.0 + r.c), mu_oracle, 1e-6);
  EXPECT_NEAR(r.c, 0.7849733, 1e-6);
  EXPECT_TRUE(r.extrapolated);
  const auto t = build_tower(make_affine_family(2.0, r.c), 6, 2);
  EXPECT_EQ(t.depth(), 6);
  for (const auto& lv : t.levels()) EXPECT_FALSE(lv.boundary);
}

TEST(Tune, SuperstableAnchorsMatchLogistic) {
  const std::vector<int> target(8, 2);
  const auto anchors = superstable_sequence(2.0, target);
  const auto mu = oracle::logistic_superstable(8);
  ASSERT_EQ(anchors.size(), 8u);
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    const double c = anchors[k];
    EXPECT_NEAR(c * (1.0 + c), static_cast<double>(mu[k + 1]), 1e-10) << "anchor " << k + 1;
  }
}

TEST(Tune, PeriodThree) {
  const double c = tune_parameter(2.0, {3}).c;
  const auto f = make_affine_family(2.0, c);
  EXPECT_LE(std::fabs(f(f(f(0.0)))), 1e-10);
  // Oracle: sign scan of c -> f_c^3(0) on (0.85, 1), then bisection.
  auto g = [](double s) {
    double x = 0.0;
    for (int i = 0; i < 3; ++i) x = s - (1.0 + s) * x * x;
    return x;
  };
  const auto br = oracle::sign_scan(g, 0.85, 0.9999, 1e-5);
  ASSERT_FALSE(br.empty());
  const auto expect = oracle::bisect([&](oracle::real s) { return g(double(s)); },
                                     br.back().first, br.back().second);
  EXPECT_NEAR(c, static_cast<double>(expect), 1e-10);
}

TEST(Tune, QuarticDoubling) {
  const auto r = tune_parameter(4.0, {2, 2, 2, 2, 2});
  const auto t = build_tower(make_affine_family(4.0, r.c), 5, 2);
  EXPECT_EQ(t.depth(), 5);
  for (const auto& lv : t.levels()) EXPECT_EQ(lv.n, 2);
}

TEST(Tune, TriplingTwice) {
  const auto r = tune_parameter(2.0, {3, 3});
  const auto t = build_tower(make_affine_family(2.0, r.c), 2, 3);
  EXPECT_EQ(t.level(1).n, 3);
  EXPECT_EQ(t.level(2).n, 3);
}

TEST(Tune, MixedTypeBestEffort) {
  const auto r = tune_parameter(2.0, {2, 3});
  const auto t = build_tower(make_affine_family(2.0, r.c), 2, 3);
  EXPECT_EQ(t.level(1).n, 2);
  EXPECT_EQ(t.level(2).n, 3);
}

TEST(Tune, Deterministic) {
  const auto a = tune_parameter(2.0, {2, 2, 2, 2});
  const auto b = tune_parameter(2.0, {2, 2, 2, 2});
  EXPECT_EQ(a.c, b.c);
  EXPECT_EQ(a.superstable, b.superstable);
}

TEST(Tune, RejectsBadInput) {
  EXPECT_THROW(tune_parameter(1.0, {2}), ParameterError);
  EXPECT_THROW(tune_parameter(2.0, std::vector<int>{}), ParameterError);
  EXPECT_THROW(tune_parameter(2.0, {1}), ParameterError);
}
