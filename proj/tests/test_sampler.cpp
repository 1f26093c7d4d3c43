#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <vector>

#include "urbanik/sampler.hpp"
#include "urbanik/special.hpp"

using namespace urbanik;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

/// Standard error of the sample variance from the fourth moment.
double variance_band(double var, double kurtosis_excess, std::size_t n) {
  return 3.0 * var * std::sqrt((2.0 + kurtosis_excess) / static_cast<double>(n));
}

const std::vector<double>& sinh_samples() {
  static const std::vector<double> xs = [] {
    SampleRun run{catalog_get("sinh"), 100000, 1000, 20240611, TailCorrection::gaussian_variance_match};
    return sample_series(run);
  }();
  return xs;
}

}  // namespace

TEST(Rng, SplitMixReferenceValues) {
  // SplitMix64 outputs for seed 1234567.
  std::uint64_t s = 1234567;
  EXPECT_EQ(splitmix64(s), 6457827717110365317ULL);
  EXPECT_EQ(splitmix64(s), 3203168211198807973ULL);
}

TEST(Rng, SubstreamsDiffer) {
  auto a = substream(1, 1, 0);
  auto b = substream(1, 2, 0);
  auto c = substream(1, 1, 1);
  auto d = substream(1, 1, 0);
  const auto va = a();
  EXPECT_NE(va, b());
  EXPECT_NE(va, c());
  EXPECT_EQ(va, d());
}

TEST(Laplace, Moments) {
  const auto xs = sample_laplace(100000, 99);
  const double var = sample_variance(xs);
  EXPECT_GE(var, 1.94);
  EXPECT_LE(var, 2.06);
  EXPECT_LT(std::abs(sample_mean(xs)), 0.02);
  const auto pos = std::count_if(xs.begin(), xs.end(), [](double x) { return x > 0.0; });
  EXPECT_GE(pos, 49400);
  EXPECT_LE(pos, 50600);
}

TEST(Laplace, SeriesWithSingleUnitTermIsLaplace) {
  LaplaceSeriesSpec one;
  one.coefficients = [](std::uint64_t) { return 1.0; };
  one.truncation = 1;
  one.length = 1;
  EXPECT_EQ(sample_series(one, 5000, 3, TailCorrection::none), sample_laplace(5000, 3));
  EXPECT_EQ(sample_series(one, 5000, 3), sample_laplace(5000, 3));
}

TEST(Series, SinhVarianceAndEcf) {
  const auto& xs = sinh_samples();
  // Var = 1/3; the law has excess kurtosis 6/5 (kappa4 = 2/15).
  EXPECT_NEAR(sample_variance(xs), 1.0 / 3.0, variance_band(1.0 / 3.0, 1.2, xs.size()));
  const auto spec = catalog_get("sinh");
  const auto report = ecf_check(xs, spec.cf_closed, grid(-8.0, 8.0, 161));
  EXPECT_TRUE(report.passed()) << report.violations;
  EXPECT_EQ(report.ecf[80], 1.0);
  EXPECT_EQ(report.target[80], 1.0);
}

TEST(Series, WrongTargetFails) {
  const auto report = ecf_check(sinh_samples(), catalog_get("cosh").cf_closed, grid(-8.0, 8.0, 161));
  EXPECT_FALSE(report.passed());
  EXPECT_GT(report.max_deviation(), 0.1);
}

TEST(Series, CoshVariance) {
  SampleRun run{catalog_get("cosh"), 100000, 1000, 5, TailCorrection::gaussian_variance_match};
  const auto xs = sample_series(run);
  // Excess kurtosis of 1/cosh-law is 2.
  EXPECT_NEAR(sample_variance(xs), 1.0, variance_band(1.0, 2.0, xs.size()));
}

TEST(Series, VarianceAdditivityWithoutCorrection) {
  const auto spec = catalog_get("sinh");
  SampleRun run{spec, 50000, 10, 8, TailCorrection::none};
  const auto xs = sample_series(run);
  const double head = 2.0 * (spec.rate_sequence->tail(0).s2 - spec.rate_sequence->tail(10).s2);
  EXPECT_NEAR(sample_variance(xs), head, variance_band(head, 1.5, xs.size()));
}

TEST(Series, TruncationConsistency) {
  // Both runs share the first 100 terms, so the ECF difference tracks
  // phi_100 - phi_10000 up to noise of sd |t| sqrt(E delta^2 / n).
  const auto spec = catalog_get("sinh");
  const std::size_t n = 20000;
  const auto xs100 = sample_series(SampleRun{spec, n, 100, 77, TailCorrection::none});
  const auto xs10k = sample_series(SampleRun{spec, n, 10000, 77, TailCorrection::none});
  const auto ts = grid(-8.0, 8.0, 33);
  const auto r100 = ecf_check(xs100, spec.cf_closed, ts);
  const auto r10k = ecf_check(xs10k, spec.cf_closed, ts);
  const auto& seq = *spec.rate_sequence;
  const double delta_var = 2.0 * (seq.tail(100).s2 - seq.tail(10000).s2);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double p100 = 1.0, p10k = 1.0;
    for (int k = 1; k <= 10000; ++k) {
      const double a = seq.coefficient(k) * ts[i];
      p10k /= 1.0 + a * a;
      if (k == 100) p100 = p10k;
    }
    const double sd = std::abs(ts[i]) * std::sqrt(delta_var / static_cast<double>(n));
    EXPECT_NEAR(r100.ecf[i] - r10k.ecf[i], p100 - p10k, 5.0 * sd + 1e-12) << ts[i];
  }
}

TEST(Series, TailUnknown) {
  LaplaceSeriesSpec s;
  s.coefficients = [](std::uint64_t k) { return 1.0 / static_cast<double>(k); };
  s.truncation = 10;
  EXPECT_THROW(sample_series(s, 10, 1), TailUnknown);
  EXPECT_NO_THROW(sample_series(s, 10, 1, TailCorrection::none));
}

TEST(Series, Deterministic) {
  SampleRun run{catalog_get("cosh"), 9000, 50, 11, TailCorrection::gaussian_variance_match};
  EXPECT_EQ(sample_series(run), sample_series(run));
  run.seed = 12;
  const auto other = sample_series(run);
  run.seed = 11;
  EXPECT_NE(sample_series(run), other);
}

TEST(Series, IndependentOfThreadCount) {
  SampleRun run{catalog_get("sinh"), 3 * kSampleBlock + 17, 40, 4, TailCorrection::gaussian_variance_match};
  ::setenv("URBANIK_THREADS", "1", 1);
  const auto one = sample_series(run);
  ::setenv("URBANIK_THREADS", "3", 1);
  EXPECT_EQ(sampler_threads(), 3u);
  const auto three = sample_series(run);
  ::unsetenv("URBANIK_THREADS");
  EXPECT_EQ(one, three);
}

TEST(Series, InvalidRun) {
  SampleRun run{catalog_get("sinh"), 0, 10, 1, TailCorrection::none};
  EXPECT_THROW(sample_series(run), InvalidParam);
  run.n = 10;
  run.K = 0;
  EXPECT_THROW(sample_series(run), InvalidParam);
}

TEST(GeneralizedLogistic, AlphaOneIsLogistic) {
  const auto xs = sample_generalized_logistic(1.0, 100000, 21);
  const auto r = ecf_check(xs, [](double t) { return gamma_ratio_modulus_sq(1.0, t); }, grid(-8.0, 8.0, 161));
  EXPECT_TRUE(r.passed());
  std::vector<double> sorted = xs;
  std::nth_element(sorted.begin(), sorted.begin() + 50000, sorted.end());
  EXPECT_LT(std::abs(sorted[50000]), 0.02);
  // Var = pi^2 / 3, excess kurtosis 6/5.
  EXPECT_NEAR(sample_variance(xs), pi * pi / 3.0, variance_band(pi * pi / 3.0, 1.2, xs.size()));
}

TEST(GeneralizedLogistic, AlphaTwo) {
  const auto xs = sample_generalized_logistic(2.0, 100000, 7);
  const auto r = ecf_check(xs, [](double t) { return gamma_ratio_modulus_sq(2.0, t); }, grid(-8.0, 8.0, 161));
  EXPECT_LE(static_cast<double>(r.violations), 0.05 * 161);
  EXPECT_THROW(sample_generalized_logistic(0.0, 10, 1), InvalidParam);
}

TEST(Ecf, OriginIsExact) {
  const std::vector<double> xs{0.3, -1.2, 7.0};
  const auto r = ecf_check(xs, [](double) { return 1.0; }, std::vector<double>{0.0});
  EXPECT_EQ(r.ecf[0], 1.0);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_THROW(ecf_check(std::vector<double>{}, [](double) { return 1.0; }, std::vector<double>{0.0}),
               InvalidParam);
}

TEST(Csv, Headers) {
  std::ostringstream a;
  write_samples_csv(a, std::vector<double>{0.5, -0.25});
  EXPECT_EQ(a.str(), "x\n0.5\n-0.25\n");
  EcfReport r;
  r.t_grid = {0.0};
  r.ecf = {1.0};
  r.target = {1.0};
  r.band = 0.125;
  std::ostringstream b;
  write_ecf_csv(b, r);
  EXPECT_EQ(b.str(), "t,ecf,target,band\n0,1,1,0.125\n");
}

TEST(Csv, RoundTripFormatting) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678}) EXPECT_EQ(std::stod(format_double(v)), v);
}
