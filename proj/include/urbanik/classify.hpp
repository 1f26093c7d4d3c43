#pragma once

// The D-operator (Dk)(x) = (-x k(x))' on symmetric Levy densities, sign scans
// of its iterates, and Urbanik-class verdicts built from them.
//
// Verdicts are numeric evidence on a grid: a negative value is a witness, a
// clean scan is not a proof of non-negativity.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "urbanik/error.hpp"
#include "urbanik/exp_poly.hpp"
#include "urbanik/levy.hpp"
#include "urbanik/quadrature.hpp"

namespace urbanik {

enum class GridScale { linear, logarithmic };

struct ScanGrid {
  double x_min = 1e-4;
  double x_max = 50.0;
  int points = 4000;
  GridScale scale = GridScale::logarithmic;
  int refine_iters = 40;

  void validate() const {
    if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max)) {
      throw InvalidParam("ScanGrid: need 0 < x_min < x_max");
    }
    if (points < 2) throw InvalidParam("ScanGrid: need at least 2 points");
    if (refine_iters < 0) throw InvalidParam("ScanGrid: refine_iters must be >= 0");
  }

  /// Node i; nodes of a grid with 2(points-1)+1 points contain these exactly.
  double node(int i) const {
    const double frac = static_cast<double>(i) / static_cast<double>(points - 1);
    if (i == points - 1) return x_max;
    if (scale == GridScale::linear) return x_min + frac * (x_max - x_min);
    const double lo = std::log(x_min);
    return std::exp(lo + frac * (std::log(x_max) - lo));
  }

  std::vector<double> nodes() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = node(i);
    return out;
  }

  /// Same range, every interval halved.
  ScanGrid refined() const {
    ScanGrid g = *this;
    g.points = 2 * (points - 1) + 1;
    return g;
  }
};

/// Sign failures are values below -kSignTolerance * max|f| on the grid.
inline constexpr double kSignTolerance = 1e-12;
inline constexpr double kEndpointTolerance = 1e-4;
inline constexpr double kMinimumTolerance = 1e-6;

/// D^n k. For series tails the iterate is exact (u_{j+1} = -x u_j'); for
/// chains it comes from the stored closed form.
inline LevyDensity d_operator(const LevyDensity& k, int n) {
  if (n < 0) throw InvalidParam("d_operator: n must be >= 0");
  if (n == 0) return k;
  if (k.is_series()) {
    SeriesTail s = k.series();
    for (int j = 0; j < n; ++j) {
      s.tail = d_step(s.tail);
      if (s.dropped) s.dropped->shape = d_step(s.dropped->shape);
    }
    return k.with_rep(std::move(s), k.level() + n);
  }
  return k.with_rep(k.chain().at_level(k.chain().level() + n));
}

struct NegativeRegion {
  double x = 0.0;      // location of the minimum
  double value = 0.0;  // density there (< 0)
  double lo = 0.0;     // negative on (lo, hi)
  double hi = 0.0;
  bool lo_open = false;  // region reaches the grid's lower end
  bool hi_open = false;  // region reaches the grid's upper end
};

struct SignScan {
  std::optional<NegativeRegion> negative;  // empty: non-negative on the grid
  double grid_min = 0.0;
  double grid_max_abs = 0.0;

  bool non_negative() const { return !negative.has_value(); }
};

namespace detail {

template <class F>
double bisect_sign_change(F&& f, double nonneg_x, double neg_x, int iters) {
  for (int i = 0; i < iters && std::abs(neg_x - nonneg_x) > kEndpointTolerance * 1e-3; ++i) {
    const double mid = 0.5 * (nonneg_x + neg_x);
    if (f(mid) < 0.0) {
      neg_x = mid;
    } else {
      nonneg_x = mid;
    }
  }
  return 0.5 * (nonneg_x + neg_x);
}

template <class F>
std::pair<double, double> golden_minimum(F&& f, double a, double b, int iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iters && (b - a) > kMinimumTolerance * 1e-3; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace detail

/// Scans the density k(x) = u(x)/x on the grid (x > 0; symmetric) and, on a
/// sign failure, refines the deepest negative region.
inline SignScan sign_scan(const LevyDensity& k, const ScanGrid& grid) {
  const std::vector<double> xs = grid.nodes();
  std::vector<double> fs(xs.size());
  SignScan out;
  out.grid_min = std::numeric_limits<double>::infinity();
  std::size_t imin = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fs[i] = k(xs[i]);
    if (std::isnan(fs[i])) throw DomainError(k.name() + ": density is NaN at x = " + std::to_string(xs[i]));
    out.grid_max_abs = std::max(out.grid_max_abs, std::abs(fs[i]));
    if (fs[i] < out.grid_min) {
      out.grid_min = fs[i];
      imin = i;
    }
  }
  if (!(out.grid_min < -kSignTolerance * out.grid_max_abs)) return out;

  auto f = [&](double x) { return k(x); };
  std::size_t left = imin;
  while (left > 0 && fs[left - 1] < 0.0) --left;
  std::size_t right = imin;
  while (right + 1 < xs.size() && fs[right + 1] < 0.0) ++right;

  NegativeRegion region;
  if (left == 0) {
    region.lo = xs.front();
    region.lo_open = true;
  } else {
    region.lo = detail::bisect_sign_change(f, xs[left - 1], xs[left], grid.refine_iters);
  }
  if (right + 1 == xs.size()) {
    region.hi = xs.back();
    region.hi_open = true;
  } else {
    region.hi = detail::bisect_sign_change(f, xs[right + 1], xs[right], grid.refine_iters);
  }
  const double a = xs[imin > 0 ? imin - 1 : 0];
  const double b = xs[std::min(imin + 1, xs.size() - 1)];
  auto [x, v] = detail::golden_minimum(f, a, b, grid.refine_iters);
  if (v > fs[imin]) {
    x = xs[imin];
    v = fs[imin];
  }
  region.x = x;
  region.value = v;
  out.negative = region;
  return out;
}

struct MassFailure {
  int level = 0;
  double mass = 0.0;
};

struct ClassVerdict {
  std::string distribution;
  int achieved_level = -1;  // -1: infinitely divisible but not L_0
  bool bounded_above = false;
  int max_level = 0;
  std::optional<NegativeRegion> witness;
  int witness_level = 0;  // n of the D^n that went negative
  std::vector<MassFailure> mass_failures;
  ScanGrid grid_used;
};

/// Largest j <= max_level such that D^1..D^{j+1} scan non-negative and
/// D^0..D^j have infinite mass. Stops at the first failure, which becomes
/// the witness. Mass of D^j is checked before the sign of D^{j+1}.
inline ClassVerdict classify(const LevyDensity& k, int max_level, const ScanGrid& grid,
                             const QuadratureConfig& cfg = {}) {
  if (max_level < 0) throw InvalidParam("classify: max_level must be >= 0");
  grid.validate();
  require_integrable(k, cfg);
  ClassVerdict v;
  v.distribution = k.name();
  v.max_level = max_level;
  v.grid_used = grid;
  for (int j = 0; j <= max_level; ++j) {
    const double mass = total_mass(d_operator(k, j), cfg);
    if (!(mass == std::numeric_limits<double>::infinity())) {
      v.mass_failures.push_back({j, mass});
      v.bounded_above = true;
      return v;
    }
    const SignScan scan = sign_scan(d_operator(k, j + 1), grid);
    if (!scan.non_negative()) {
      v.witness = scan.negative;
      v.witness_level = j + 1;
      v.bounded_above = true;
      return v;
    }
    v.achieved_level = j;
  }
  return v;
}

struct LevelRow {
  int n = 0;
  double grid_min = 0.0;
  double normalized_min = 0.0;  // grid_min / max|D^n k| on the grid
  double mass = 0.0;
};

/// One row per n in 1..n_max: grid minimum of D^n k and its mass.
inline std::vector<LevelRow> level_report(const LevyDensity& k, int n_max, const ScanGrid& grid,
                                          const QuadratureConfig& cfg = {}) {
  std::vector<LevelRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    const LevyDensity dn = d_operator(k, n);
    const SignScan scan = sign_scan(dn, grid);
    LevelRow row;
    row.n = n;
    row.grid_min = scan.negative ? scan.negative->value : scan.grid_min;
    row.normalized_min = scan.grid_max_abs > 0.0 ? row.grid_min / scan.grid_max_abs : 0.0;
    row.mass = total_mass(dn, cfg);
    rows.push_back(row);
  }
  return rows;
}

/// Truncation K for a series with rates b_k so that, at x_min, the dropped
/// terms of D^n (each ~ (b x)^n e^{-bx}) are below 1e-14 of the kept sum.
/// Capped at `cap`.
template <class RateFn>
std::uint64_t series_truncation_for_scan(RateFn&& rate, int n, double x_min, std::uint64_t cap = 100000) {
  double kept = 0.0;
  for (std::uint64_t k = 1; k <= cap; ++k) {
    const double bx = rate(k) * x_min;
    const double weight = std::pow(bx, n) * std::exp(-bx);
    kept += weight;
    // Beyond the peak of y^n e^{-y} the terms decrease; the remainder is
    // bounded by a geometric tail in the ratio of consecutive terms.
    if (bx > n + 1.0) {
      const double next = rate(k + 1) * x_min;
      const double ratio = (n == 0 ? 1.0 : std::pow(next / bx, n)) * std::exp(-(next - bx));
      if (ratio < 1.0 && weight * ratio / (1.0 - ratio) < 1e-14 * kept) return k;
    }
  }
  return cap;
}

}  // namespace urbanik
