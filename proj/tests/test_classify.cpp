#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "urbanik/catalog.hpp"
#include "urbanik/classify.hpp"

using namespace urbanik;

namespace {

constexpr double pi = std::numbers::pi;

struct IterateCase {
  const char* dist;
  int n;
  double x;
  double want;  // (D^n k)(x), computed at 40 digits
};

constexpr IterateCase kIterates[] = {
    {"sinh", 1, 0.3, 3.2862070155432288175},    {"sinh", 2, 0.9, 0.45840092892407183962},
    {"sinh", 3, 2.0, 0.12956549356083962821},   {"sinh", 4, 0.9, -0.013626880550591975225},
    {"sinh", 4, 0.3, 3.5317528788905097484},    {"cosh", 1, 0.9, 0.45717929849727486255},
    {"cosh", 2, 2.0, 0.14859318639283631627},   {"cosh", 3, 0.3, 3.5854458536533888977},
    {"cosh", 4, 2.0, -0.34672433900638240309},  {"cosh", 4, 0.9, 0.68516371992840330735},
    {"tanh", 1, 0.9, 0.24719647426096799802},   {"tanh", 2, 0.3, -0.3311583594973239658},
    {"tanh", 3, 0.9, -0.36340876007354695815},  {"tanh", 4, 2.0, -0.68939524258550688865},
};

}  // namespace

TEST(DOperator, ChainMatchesReferenceIterates) {
  for (const auto& c : kIterates) {
    const auto k = catalog_get(c.dist).density;
    EXPECT_NEAR(d_operator(k, c.n)(c.x), c.want, 1e-11 * std::max(1.0, std::abs(c.want)))
        << c.dist << " n=" << c.n << " x=" << c.x;
  }
}

TEST(DOperator, ZeroReturnsInput) {
  const auto k = catalog_get("sinh").density;
  EXPECT_EQ(d_operator(k, 0)(0.5), k(0.5));
  EXPECT_THROW(d_operator(k, -1), InvalidParam);
}

TEST(DOperator, LaplaceFirstIterate) {
  const auto d1 = d_operator(catalog_get("laplace").density, 1);
  ASSERT_TRUE(d1.is_series());
  EXPECT_EQ(d1.series().tail, (ExpPolySum{{1.0, 1, 1.0}}));
  EXPECT_NEAR(d1(0.7), std::exp(-0.7), 1e-15);
}

TEST(DOperator, SeriesMatchesClosedStepsForSinh) {
  const auto spec = catalog_get("sinh");
  const auto series = series_density(spec.series(10000));
  EXPECT_NEAR(d_operator(series, 1)(1.0), pi / 4 / std::pow(std::sinh(pi / 2), 2), 1e-9);
  const double s = 1.0 / std::sinh(pi / 2);
  EXPECT_NEAR(d_operator(series, 2)(1.0), pi / 4 * s * s * (pi / std::tanh(pi / 2) - 1.0), 1e-8);
}

TEST(DOperator, BeyondStoredOrderThrows) {
  EXPECT_THROW(d_operator(catalog_get("sinh").density, kCatalogChainOrder + 1)(1.0), DerivativeOrderUnavailable);
}

TEST(ScanGrid, Validation) {
  ScanGrid g;
  EXPECT_NO_THROW(g.validate());
  g.x_min = 0.0;
  EXPECT_THROW(g.validate(), InvalidParam);
  g = {};
  g.points = 1;
  EXPECT_THROW(g.validate(), InvalidParam);
  g = {};
  g.x_max = g.x_min;
  EXPECT_THROW(g.validate(), InvalidParam);
}

TEST(ScanGrid, RefinedContainsOriginalNodes) {
  for (auto scale : {GridScale::linear, GridScale::logarithmic}) {
    ScanGrid g{1e-3, 7.0, 37, scale, 10};
    const auto fine = g.refined();
    for (int i = 0; i < g.points; ++i) EXPECT_EQ(g.node(i), fine.node(2 * i));
  }
}

TEST(SignScan, CoshFirstIterateIsNonNegative) {
  const auto scan = sign_scan(d_operator(catalog_get("cosh").density, 1), ScanGrid{});
  EXPECT_TRUE(scan.non_negative());
  EXPECT_GT(scan.grid_min, 0.0);
}

TEST(SignScan, SinhFourthIterateWitness) {
  const auto scan = sign_scan(d_operator(catalog_get("sinh").density, 4), ScanGrid{});
  ASSERT_FALSE(scan.non_negative());
  const auto& w = *scan.negative;
  EXPECT_LT(w.value, 0.0);
  EXPECT_NEAR(w.lo, 0.86, 0.01);
  EXPECT_NEAR(w.hi, 1.02, 0.01);
  EXPECT_GT(w.x, w.lo);
  EXPECT_LT(w.x, w.hi);
  EXPECT_FALSE(w.lo_open);
  EXPECT_FALSE(w.hi_open);
}

TEST(SignScan, MinimumIsRefinedBelowGridValues) {
  ScanGrid coarse{0.5, 1.5, 5, GridScale::linear, 60};
  const auto scan = sign_scan(d_operator(catalog_get("sinh").density, 4), coarse);
  ASSERT_TRUE(scan.negative);
  EXPECT_LE(scan.negative->value, scan.grid_min);
}

TEST(SignScan, OpenEndpointsAreFlagged) {
  // k(x) = -x e^{-x}: negative on the whole grid, deepest at x = 1.
  const auto neg = LevyDensity::from_series(ExpPolySum{{-1.0, 2, 1.0}});
  const auto scan = sign_scan(neg, ScanGrid{0.1, 2.0, 50, GridScale::linear, 40});
  ASSERT_TRUE(scan.negative);
  EXPECT_TRUE(scan.negative->lo_open);
  EXPECT_TRUE(scan.negative->hi_open);
  EXPECT_NEAR(scan.negative->x, 1.0, 1e-6);
}

TEST(Classify, Sinh) {
  const auto v = classify(catalog_get("sinh").density, 4, ScanGrid{});
  EXPECT_EQ(v.achieved_level, 2);
  EXPECT_TRUE(v.bounded_above);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness_level, 4);
  EXPECT_TRUE(v.mass_failures.empty());
}

TEST(Classify, LaplaceMassFailure) {
  const auto v = classify(catalog_get("laplace").density, 3, ScanGrid{});
  EXPECT_EQ(v.achieved_level, 0);
  ASSERT_EQ(v.mass_failures.size(), 1u);
  EXPECT_EQ(v.mass_failures[0].level, 1);
  EXPECT_NEAR(v.mass_failures[0].mass, 2.0, 1e-14);
  EXPECT_FALSE(v.witness);
}

TEST(Classify, LaplaceScalingDoesNotChangeVerdict) {
  for (double a : {0.5, 2.0}) {
    const auto k = LevyDensity::from_series(ExpPolySum::exponential(1.0, 1.0 / a));
    const auto v = classify(k, 3, ScanGrid{});
    EXPECT_EQ(v.achieved_level, 0);
    ASSERT_EQ(v.mass_failures.size(), 1u);
    EXPECT_EQ(v.mass_failures[0].level, 1);
  }
}

TEST(Classify, SignFailureAtFirstLevelGivesMinusOne) {
  // u = e^{-2x} + 3x e^{-x} increases near 0, so D^1 k < 0 there.
  const auto k = LevyDensity::from_series(ExpPolySum{{1.0, 0, 2.0}, {3.0, 1, 1.0}});
  const auto v = classify(k, 2, ScanGrid{});
  EXPECT_EQ(v.achieved_level, -1);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(v.witness_level, 1);
}

TEST(Classify, MaxLevelCapsVerdict) {
  const auto v = classify(catalog_get("sinh").density, 1, ScanGrid{});
  EXPECT_EQ(v.achieved_level, 1);
  EXPECT_FALSE(v.bounded_above);
}

TEST(Classify, SinhSecondIterateReducesToXCothInequality) {
  // D^2 k >= 0  <=>  (pi x) coth(pi x / 2) >= 1, and y coth y >= 1
  const auto d2 = d_operator(catalog_get("sinh").density, 2);
  for (double x : {0.01, 0.2, 1.0, 3.0, 9.0}) {
    const double y = pi * x / 2;
    EXPECT_GE(y / std::tanh(y), 1.0);
    EXPECT_GE(d2(x), 0.0);
  }
}

TEST(LevelReport, Laplace) {
  const auto rows = level_report(catalog_get("laplace").density, 1, ScanGrid{});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(rows[0].grid_min, 0.0);
  EXPECT_NEAR(rows[0].mass, 2.0, 1e-14);
}

TEST(LevelReport, SinhFourthRowNegative) {
  const auto rows = level_report(catalog_get("sinh").density, 4, ScanGrid{});
  ASSERT_EQ(rows.size(), 4u);
  for (int i = 0; i < 3; ++i) EXPECT_GE(rows[i].grid_min, 0.0);
  EXPECT_LT(rows[3].grid_min, 0.0);
}

TEST(LevelReport, LogisticAlphaTwo) {
  CatalogParams p;
  p.alpha = 2.0;
  const auto rows = level_report(catalog_get("logistic", p).density, 2, ScanGrid{});
  for (const auto& r : rows) EXPECT_GE(r.grid_min, 0.0);
}

TEST(SeriesTruncation, GrowsWithLevelAndShrinkingXMin) {
  auto rate = [](std::uint64_t k) { return pi * static_cast<double>(k); };
  const auto k1 = series_truncation_for_scan(rate, 1, 1e-2);
  const auto k4 = series_truncation_for_scan(rate, 4, 1e-2);
  const auto k4_small = series_truncation_for_scan(rate, 4, 1e-3);
  EXPECT_LE(k1, k4);
  EXPECT_LT(k4, k4_small);
  EXPECT_EQ(series_truncation_for_scan(rate, 4, 1e-7), 100000u);
}
