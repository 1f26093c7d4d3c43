#pragma once

// Monte Carlo draws from Laplace series X = sum a_k eta_k and from the
// generalized logistic law, with an empirical characteristic-function check.
//
// Random numbers: every (stream, block) pair owns an std::mt19937_64 seeded
// by SplitMix64 from (seed, stream, block). Stream k >= 1 carries eta_k,
// stream 0 the Gaussian tail correction; blocks hold kSampleBlock samples.
// Output is therefore independent of the thread count, and refining K only
// appends new streams.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "urbanik/catalog.hpp"
#include "urbanik/error.hpp"
#include "urbanik/exp_poly.hpp"

namespace urbanik {

inline constexpr std::size_t kSampleBlock = 4096;

/// One SplitMix64 step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
  std::uint64_t state = seed;
  std::uint64_t key = splitmix64(state);
  state = key ^ stream;
  key = splitmix64(state);
  state = key ^ block;
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(state >> 32),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(state >> 32)};
  return std::mt19937_64(seq);
}

/// Thread count: URBANIK_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline unsigned sampler_threads() {
  if (const char* env = std::getenv("URBANIK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/// Calls fill(block, first, count) for every block, spread over threads.
inline void for_each_block(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& fill) {
  const std::size_t blocks = (n + kSampleBlock - 1) / kSampleBlock;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(sampler_threads(), blocks));
  auto run_block = [&](std::size_t b) {
    const std::size_t first = b * kSampleBlock;
    fill(b, first, std::min(kSampleBlock, n - first));
  };
  if (threads <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned i = 0; i < threads; ++i) {
    pool.emplace_back([&] {
      try {
        for (std::size_t b = next++; b < blocks; b = next++) run_block(b);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

enum class TailCorrection { none, gaussian_variance_match };

struct SampleRun {
  DistributionSpec distribution;
  std::size_t n = 1;
  std::uint64_t K = 1000;
  std::uint64_t seed = 0;
  TailCorrection tail_correction = TailCorrection::gaussian_variance_match;

  void validate() const {
    if (n < 1) throw InvalidParam("SampleRun: n must be >= 1");
    if (K < 1) throw InvalidParam("SampleRun: K must be >= 1");
  }
};

/// sum_{k<=K} a_k eta_k with eta = E1 - E2, plus N(0, 2 sum_{k>K} a_k^2)
/// under gaussian_variance_match.
inline std::vector<double> sample_series(const LaplaceSeriesSpec& spec, std::size_t n, std::uint64_t seed,
                                         TailCorrection correction = TailCorrection::gaussian_variance_match) {
  if (n < 1) throw InvalidParam("sample_series: n must be >= 1");
  validate_series(spec);
  double tail_sd = 0.0;
  if (correction == TailCorrection::gaussian_variance_match && spec.has_dropped_terms()) {
    if (!spec.analytic_tail) throw TailUnknown("sample_series: no analytic tail variance for the dropped terms");
    tail_sd = std::sqrt(2.0 * spec.analytic_tail(spec.truncation).s2);
  }
  std::vector<double> coeffs(spec.terms());
  for (std::uint64_t k = 1; k <= spec.terms(); ++k) coeffs[k - 1] = spec.coefficients(k);

  std::vector<double> out(n, 0.0);
  detail::for_each_block(n, [&](std::size_t block, std::size_t first, std::size_t count) {
    double* x = out.data() + first;
    std::exponential_distribution<double> expo(1.0);
    for (std::uint64_t k = 1; k <= coeffs.size(); ++k) {
      auto gen = substream(seed, k, block);
      const double a = coeffs[k - 1];
      for (std::size_t i = 0; i < count; ++i) {
        const double e1 = expo(gen);
        const double e2 = expo(gen);
        x[i] += a * (e1 - e2);
      }
    }
    if (tail_sd > 0.0) {
      auto gen = substream(seed, 0, block);
      std::normal_distribution<double> normal(0.0, tail_sd);
      for (std::size_t i = 0; i < count; ++i) x[i] += normal(gen);
    }
  });
  return out;
}

inline std::vector<double> sample_series(const SampleRun& run) {
  run.validate();
  return sample_series(run.distribution.series(run.K), run.n, run.seed, run.tail_correction);
}

/// Draws with density e^{-|x|} / 2.
inline std::vector<double> sample_laplace(std::size_t n, std::uint64_t seed) {
  return sample_series(catalog_get("laplace").series(1), n, seed, TailCorrection::none);
}

/// log(G1 / G2) with G1, G2 ~ Gamma(alpha), the logit of a Beta(alpha, alpha)
/// variable.
inline std::vector<double> sample_generalized_logistic(double alpha, std::size_t n, std::uint64_t seed) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParam("sample_generalized_logistic: alpha must be > 0");
  if (n < 1) throw InvalidParam("sample_generalized_logistic: n must be >= 1");
  std::vector<double> out(n);
  detail::for_each_block(n, [&](std::size_t block, std::size_t first, std::size_t count) {
    auto g1 = substream(seed, 1, block);
    auto g2 = substream(seed, 2, block);
    std::gamma_distribution<double> gamma(alpha, 1.0);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = gamma(g1);
      const double b = gamma(g2);
      out[first + i] = std::log(a) - std::log(b);
    }
  });
  return out;
}

inline constexpr double kEcfZ = 1.96;
inline constexpr double kEcfAllowedFraction = 0.10;

struct EcfReport {
  std::vector<double> t_grid;
  std::vector<double> ecf;
  std::vector<double> target;
  double band = 0.0;  // z / sqrt(n)
  std::size_t violations = 0;
  std::size_t n = 0;

  double max_deviation() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < ecf.size(); ++i) worst = std::max(worst, std::abs(ecf[i] - target[i]));
    return worst;
  }
  /// At most twice the nominal 5% of grid points outside the band.
  bool passed() const {
    return static_cast<double>(violations) <= kEcfAllowedFraction * static_cast<double>(t_grid.size());
  }
};

/// (1/n) sum cos(t x_i) against target(t) on every grid point.
inline EcfReport ecf_check(std::span<const double> samples, const std::function<double(double)>& target,
                           std::span<const double> t_grid) {
  if (samples.empty()) throw InvalidParam("ecf_check: no samples");
  EcfReport r;
  r.n = samples.size();
  r.band = kEcfZ / std::sqrt(static_cast<double>(r.n));
  r.t_grid.assign(t_grid.begin(), t_grid.end());
  for (double t : t_grid) {
    detail::NeumaierSum acc;
    for (double x : samples) acc.add(std::cos(t * x));
    const double e = acc.value() / static_cast<double>(r.n);
    const double f = target(t);
    r.ecf.push_back(e);
    r.target.push_back(f);
    if (std::abs(e - f) > r.band) ++r.violations;
  }
  return r;
}

inline double sample_mean(std::span<const double> xs) {
  detail::NeumaierSum acc;
  for (double x : xs) acc.add(x);
  return acc.value() / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
  const double m = sample_mean(xs);
  detail::NeumaierSum acc;
  for (double x : xs) acc.add((x - m) * (x - m));
  return acc.value() / static_cast<double>(xs.size() - 1);
}

/// Shortest round-trip decimal form, independent of the locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_samples_csv(std::ostream& os, std::span<const double> samples) {
  os << "x\n";
  for (double x : samples) os << format_double(x) << '\n';
}

inline void write_ecf_csv(std::ostream& os, const EcfReport& r) {
  os << "t,ecf,target,band\n";
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) {
    os << format_double(r.t_grid[i]) << ',' << format_double(r.ecf[i]) << ',' << format_double(r.target[i]) << ','
       << format_double(r.band) << '\n';
  }
}

}  // namespace urbanik
