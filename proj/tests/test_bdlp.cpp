#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "urbanik/bdlp.hpp"

using namespace urbanik;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

TEST(Bdcf, ClosedValues) {
  const auto s = catalog_get("sinh");
  EXPECT_NEAR(bdcf(s, 1.0), 0.73122411050580305312, 1e-15);
  EXPECT_EQ(bdcf(s, 0.0), 1.0);
  EXPECT_NEAR(bdcf(catalog_get("cosh"), 2.0), std::exp(-2.0 * std::tanh(2.0)), 1e-15);
  EXPECT_NEAR(bdcf(catalog_get("laplace"), 1.0), std::exp(-1.0), 1e-15);
}

TEST(Bdcf, NumericMatchesClosed) {
  for (const char* name : {"sinh", "cosh", "tanh", "laplace"}) {
    const auto spec = catalog_get(name);
    for (double t : grid(-5.0, 5.0, 41)) EXPECT_NEAR(bdcf_numeric(spec, t), bdcf(spec, t), 1e-9) << name << " " << t;
  }
  CatalogParams p;
  p.c = 0.3;
  const auto z = catalog_get("talacko_zolotarev", p);
  for (double t : grid(-5.0, 5.0, 21)) EXPECT_NEAR(bdcf_numeric(z, t), bdcf(z, t), 1e-9) << t;
}

TEST(Bdcf, SelfCheckOfClosedSinh) {
  const auto s = catalog_get("sinh");
  for (double t : {0.3, 1.0, 4.0, -2.0}) EXPECT_NEAR(bdcf(s, t) * std::exp(t / std::tanh(t) - 1.0), 1.0, 1e-12);
}

TEST(Bdcf, ValuesInUnitInterval) {
  for (const auto& name : catalog_names()) {
    CatalogParams p;
    p.alpha = 0.7;
    p.c = 0.6;
    const auto spec = catalog_get(name, p);
    for (double t : grid(-10.0, 10.0, 81)) {
      const double v = bdcf(spec, t);
      EXPECT_GT(v, 0.0) << name << " " << t;
      EXPECT_LE(v, 1.0 + 1e-12) << name << " " << t;
    }
  }
}

TEST(Bdcf, Table) {
  const auto ts = grid(-2.0, 2.0, 5);
  const auto closed = bdcf_table(catalog_get("sinh"), ts);
  EXPECT_EQ(closed.method, BdcfMethod::closed);
  const auto numeric = bdcf_table(catalog_get("sinh"), ts, true);
  EXPECT_EQ(numeric.method, BdcfMethod::numeric_logderiv);
  ASSERT_EQ(numeric.psi_values.size(), 5u);
  EXPECT_EQ(numeric.psi_values[2], 1.0);
  CatalogParams p;
  p.alpha = 2.0;
  EXPECT_EQ(bdcf_table(catalog_get("logistic", p), ts).method, BdcfMethod::numeric_logderiv);
}

TEST(Decomposition, SinhAndCosh) {
  const auto ts = grid(-5.0, 5.0, 101);
  for (const char* name : {"sinh", "cosh"}) {
    for (double c : {0.3, 0.5, 0.9}) EXPECT_LT(verify_decomposition(catalog_get(name), c, ts), 1e-8) << name << c;
  }
}

TEST(Decomposition, ResidualDegeneratesNearOne) {
  const auto ts = grid(-5.0, 5.0, 11);
  const auto rows = decomposition_table(catalog_get("sinh"), 0.999, ts);
  for (const auto& r : rows) EXPECT_NEAR(r.psi_c, 1.0, 1e-2);
}

TEST(Bdrv, LevyDensityRouteMatchesLogDerivative) {
  for (const char* name : {"sinh", "cosh"}) {
    const auto spec = catalog_get(name);
    for (double t : grid(-5.0, 5.0, 21)) EXPECT_NEAR(bdrv_char_function(spec, t), bdcf(spec, t), 1e-6);
  }
  CatalogParams p;
  p.alpha = 2.0;
  const auto l = catalog_get("logistic", p);
  for (double t : grid(-5.0, 5.0, 11)) EXPECT_NEAR(bdrv_char_function(l, t), bdcf(l, t), 1e-6);
}
