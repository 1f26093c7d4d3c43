#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "urbanik/jet.hpp"
#include "urbanik/quadrature.hpp"

using namespace urbanik;

TEST(Jet, ExpTaylorCoefficients) {
  const auto j = exp(Jet<5>::variable(0.7));
  double fact = 1.0;
  for (int i = 0; i <= 5; ++i) {
    if (i > 0) fact *= i;
    EXPECT_NEAR(j[i], std::exp(0.7) / fact, 1e-14);
  }
}

TEST(Jet, DivisionInvertsMultiplication) {
  const auto x = Jet<6>::variable(1.3);
  const auto f = exp(x) + x * x;
  const auto g = (f * (x + 2.0)) / (x + 2.0);
  for (int i = 0; i <= 6; ++i) EXPECT_NEAR(g[i], f[i], 1e-13);
}

TEST(Jet, Expm1SmallArgument) {
  const auto j = expm1(Jet<3>::variable(1e-12));
  // expm1(h) = h + h^2/2 + ..., derivative exp(h) = 1 + h + ...
  EXPECT_NEAR(j.value(), 1e-12 + 5e-25, 1e-36);
  EXPECT_NEAR(j[1], 1.0 + 1e-12, 1e-15);
}

TEST(Jet, DIterationOnExponential) {
  // u = e^{-x}: u_1 = x e^{-x}, u_2 = x (x - 1) e^{-x}
  const double x = 0.8;
  const auto u = exp(-Jet<4>::variable(x));
  EXPECT_NEAR(iterate_d_on_jet(u, x, 1), x * std::exp(-x), 1e-15);
  EXPECT_NEAR(iterate_d_on_jet(u, x, 2), x * (x - 1.0) * std::exp(-x), 1e-15);
}

TEST(Quadrature, ConfigValidation) {
  QuadratureConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.rel_tol = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidParam);
  cfg = {};
  cfg.tail_cutoff = 1e-4;
  EXPECT_THROW(cfg.validate(), InvalidParam);
  cfg = {};
  cfg.max_subdivisions = 0;
  EXPECT_THROW(cfg.validate(), InvalidParam);
}

TEST(Quadrature, HalfLineExponential) {
  QuadratureConfig cfg;
  auto f = [](double x) { return std::exp(-x); };
  EXPECT_NEAR(integrate_half_line(f, f, cfg), 1.0, 1e-12);
}

TEST(Quadrature, FrullaniIntegral) {
  // \int (e^{-x} - e^{-2x}) / x = log 2
  QuadratureConfig cfg;
  auto g = [](double x) { return std::exp(-x) - std::exp(-2.0 * x); };
  auto f = [&](double x) { return g(x) / x; };
  EXPECT_NEAR(integrate_half_line(f, g, cfg), std::numbers::ln2, 1e-11);
}

TEST(Quadrature, FailureIsReported) {
  QuadratureConfig cfg;
  cfg.max_subdivisions = 2;
  cfg.rel_tol = 1e-15;
  auto f = [](double x) { return std::sin(200.0 * x) / std::sqrt(x); };
  EXPECT_THROW(integrate(f, 1e-12, 1.0, cfg), QuadratureFailure);
}

TEST(Quadrature, NonDecayingTailHasNoCutoff) {
  EXPECT_THROW(find_tail_cutoff([](double) { return 1.0; }, 1e-3), QuadratureFailure);
}
