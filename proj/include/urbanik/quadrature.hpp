#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "urbanik/error.hpp"

namespace urbanik {

struct QuadratureConfig {
  double split_point = 1e-3;  // epsilon
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  /// Upper truncation of [0, inf). Zero selects it automatically so that the
  /// integrand's tail is below 1e-16 of its size at split_point.
  double tail_cutoff = 0.0;

  void validate() const {
    if (!(rel_tol > 0.0)) throw InvalidParam("QuadratureConfig: rel_tol must be positive");
    if (!(split_point > 0.0)) throw InvalidParam("QuadratureConfig: split_point must be positive");
    if (max_subdivisions < 1) throw InvalidParam("QuadratureConfig: max_subdivisions must be >= 1");
    if (tail_cutoff != 0.0 && !(split_point < tail_cutoff)) {
      throw InvalidParam("QuadratureConfig: split_point must be below tail_cutoff");
    }
  }
};

inline constexpr double kTailRelativeThreshold = 1e-16;

namespace detail {

struct GkPiece {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

/// One 31-point Kronrod / 15-point Gauss pair on [a, b].
template <class F>
GkPiece gk31(F& f, double a, double b) {
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  using gauss = boost::math::quadrature::gauss<double, 15>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double k = f0 * wk[0];
  double g = f0 * wg[0];
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double fp = f(mid + half * x[i]);
    const double fm = f(mid - half * x[i]);
    k += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    // Gauss nodes sit at the even Kronrod indices.
    if (i % 2 == 0) g += (fp + fm) * wg[i / 2];
  }
  GkPiece p{a, b, k * half, std::abs(k - g) * half, l1 * half};
  p.error = std::max(p.error, 50.0 * std::numeric_limits<double>::epsilon() * p.l1);
  return p;
}

}  // namespace detail

/// Globally adaptive 31-point Gauss-Kronrod on [a, b]: the piece with the
/// largest error estimate is bisected until the summed estimate meets
/// rel_tol or max_subdivisions pieces are in use.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  if (a == b) return 0.0;
  auto by_error = [](const detail::GkPiece& l, const detail::GkPiece& r) { return l.error < r.error; };
  std::vector<detail::GkPiece> heap{detail::gk31(f, a, b)};
  auto totals = [&] {
    double value = 0.0, error = 0.0, l1 = 0.0;
    for (const auto& p : heap) {
      value += p.value;
      error += p.error;
      l1 += p.l1;
    }
    return std::array<double, 3>{value, error, l1};
  };
  auto fail = [&](double error, double allowed) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] reached error " << error << " (allowed " << allowed
        << ") within " << cfg.max_subdivisions << " subdivisions";
    throw QuadratureFailure(msg.str());
  };
  while (true) {
    const auto [value, error, l1] = totals();
    if (!std::isfinite(value)) fail(error, 0.0);
    const double allowed = std::max(cfg.rel_tol * std::abs(value), 64 * std::numeric_limits<double>::epsilon() * l1);
    if (error <= allowed) return value;
    if (static_cast<int>(heap.size()) >= cfg.max_subdivisions) fail(error, allowed);
    std::pop_heap(heap.begin(), heap.end(), by_error);
    const detail::GkPiece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) fail(error, allowed);
    heap.push_back(detail::gk31(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(detail::gk31(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end(), by_error);
  }
}

/// Smallest cutoff X (on a geometric search from max(1, 2 eps)) beyond which
/// |g| stays below threshold * |g(eps)| at the probes X, 1.5X, 2X, 4X.
template <class G>
double find_tail_cutoff(G&& g, double eps) {
  const double ref = std::abs(g(eps));
  const double threshold = std::max(kTailRelativeThreshold * ref, std::numeric_limits<double>::min());
  double x = std::max(1.0, 2.0 * eps);
  for (int iter = 0; iter < 200; ++iter) {
    bool small = true;
    for (double m : {1.0, 1.5, 2.0, 4.0}) {
      const double v = std::abs(g(m * x));
      if (!(v < threshold) && !std::isnan(v)) {
        small = false;
        break;
      }
    }
    if (small) return x;
    x *= 1.5;
  }
  throw QuadratureFailure("no tail cutoff found: integrand does not decay");
}

/// Integral over (0, inf) of f, split at cfg.split_point and truncated at the
/// configured (or automatic, from |tail|) cutoff.
template <class F, class G>
double integrate_half_line(F&& f, G&& tail, const QuadratureConfig& cfg) {
  cfg.validate();
  const double eps = cfg.split_point;
  const double cutoff = cfg.tail_cutoff > 0.0 ? cfg.tail_cutoff : find_tail_cutoff(tail, eps);
  return integrate(f, 0.0, eps, cfg) + integrate(f, eps, cutoff, cfg);
}

}  // namespace urbanik
