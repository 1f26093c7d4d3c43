#pragma once

// Symmetric Levy densities k(x) and the Levy-Khintchine exponent
//
//     log phi(t) = \int (cos tx - 1) k(x) dx = 2 \int_0^inf (cos tx - 1) u(x)/x dx,
//
// where u(x) = x k(x) on x > 0 is the "tail" carried by every density here.

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "urbanik/error.hpp"
#include "urbanik/exp_poly.hpp"
#include "urbanik/jet.hpp"
#include "urbanik/quadrature.hpp"

namespace urbanik {

inline constexpr int kJetDegree = 8;
using TailJet = Jet<kJetDegree>;

/// Closed-form tail u0(x) = x k(x) with derivatives by Taylor-mode AD.
class ChainBase {
 public:
  /// `f` must be callable with both double and TailJet.
  template <class F>
  ChainBase(std::string name, F f, int max_order)
      : name_(std::move(name)), max_order_(max_order), scalar_(f), jet_(f) {
    if (max_order < 0 || max_order > kJetDegree) {
      throw InvalidParam("ChainBase: max_order must lie in [0, " + std::to_string(kJetDegree) + "]");
    }
  }

  const std::string& name() const { return name_; }
  int max_order() const { return max_order_; }

  /// u_n(x) = x (D^n k)(x), following u_{j+1} = -x u_j'.
  double iterate(int n, double x) const {
    if (n == 0) return scalar_(x);
    if (n > max_order_) {
      throw DerivativeOrderUnavailable(name_ + ": D^" + std::to_string(n) + " exceeds stored order " +
                                       std::to_string(max_order_));
    }
    return iterate_d_on_jet(jet_(TailJet::variable(x)), x, n);
  }

 private:
  std::string name_;
  int max_order_;
  std::function<double(double)> scalar_;
  std::function<TailJet(TailJet)> jet_;
};

/// weight * u(x / scale)
struct DilationTerm {
  double weight = 1.0;
  double scale = 1.0;
};

/// A closed-form tail, possibly combined with dilated copies of itself
/// (residuals), at a given D-level. D commutes with dilation, so the n-th
/// iterate of sum w u(x/s) is sum w u_n(x/s).
class ClosedFormChain {
 public:
  explicit ClosedFormChain(std::shared_ptr<const ChainBase> base) : base_(std::move(base)) {}

  const std::string& name() const { return base_->name(); }
  int level() const { return level_; }
  int max_order() const { return base_->max_order(); }
  const std::vector<DilationTerm>& terms() const { return terms_; }

  double tail(double x) const {
    double s = 0.0;
    for (const auto& term : terms_) s += term.weight * base_->iterate(level_, x / term.scale);
    return s;
  }

  ClosedFormChain at_level(int n) const {
    if (n > base_->max_order()) {
      throw DerivativeOrderUnavailable(name() + ": D^" + std::to_string(n) + " exceeds stored order " +
                                       std::to_string(base_->max_order()));
    }
    ClosedFormChain out = *this;
    out.level_ = n;
    return out;
  }

  /// u(x) - u(x / c)
  ClosedFormChain dilated_difference(double c) const {
    ClosedFormChain out = *this;
    for (const auto& term : terms_) out.terms_.push_back({-term.weight, term.scale * c});
    return out;
  }

 private:
  std::shared_ptr<const ChainBase> base_;
  std::vector<DilationTerm> terms_{{1.0, 1.0}};
  int level_ = 0;
};

/// What a truncated Laplace series leaves out: the terms k > K, each of the
/// form shape(x / a_k) combined over `scales`, summarized by the moments
/// s2 = sum_{k>K} a_k^2 and s4 = sum_{k>K} a_k^4.
struct DroppedTail {
  double s2 = 0.0;
  double s4 = 0.0;
  ExpPolySum shape = ExpPolySum::exponential(1.0, 1.0);
  std::vector<DilationTerm> scales{{1.0, 1.0}};

  /// Coefficient of tau^{2j} in the exponent of one unit-rate `shape` term:
  /// 2 sum c (-1)^j (m + 2j - 1)! / (2j)!.
  double exponent_coefficient(int j) const {
    double acc = 0.0;
    for (const auto& term : shape.terms()) {
      // (m + 2j - 1)! / (2j)! as a product; m = 0 gives 1/(2j).
      double ratio = 1.0;
      if (term.power == 0) {
        ratio = 1.0 / (2.0 * j);
      } else {
        for (int i = 2 * j + 1; i <= term.power + 2 * j - 1; ++i) ratio *= i;
      }
      acc += 2.0 * term.coeff * ((j % 2) ? -1.0 : 1.0) * ratio;
    }
    return acc;
  }

  /// Exponent of the dropped terms to O(t^6 a^6).
  double exponent_correction(double t) const {
    if (s2 == 0.0 && s4 == 0.0) return 0.0;
    const double e1 = exponent_coefficient(1);
    const double e2 = exponent_coefficient(2);
    const double t2 = t * t;
    double acc = 0.0;
    for (const auto& sc : scales) {
      const double d2 = sc.scale * sc.scale;
      acc += sc.weight * (e1 * d2 * t2 * s2 + e2 * d2 * d2 * t2 * t2 * s4);
    }
    return acc;
  }
};

struct SeriesTail {
  ExpPolySum tail;
  std::optional<DroppedTail> dropped;
};

/// Symmetric Levy density, backed by an exact exp-polynomial tail or by a
/// closed-form chain.
class LevyDensity {
 public:
  static LevyDensity from_series(ExpPolySum tail, std::optional<DroppedTail> dropped = std::nullopt,
                                 std::string name = "series") {
    return LevyDensity(SeriesTail{std::move(tail), std::move(dropped)}, std::move(name), 0);
  }

  static LevyDensity from_chain(ClosedFormChain chain) {
    std::string name = chain.name();
    const int level = chain.level();
    return LevyDensity(std::move(chain), std::move(name), level);
  }

  bool is_series() const { return std::holds_alternative<SeriesTail>(rep_); }
  const SeriesTail& series() const { return std::get<SeriesTail>(rep_); }
  const ClosedFormChain& chain() const { return std::get<ClosedFormChain>(rep_); }
  const std::string& name() const { return name_; }

  /// Number of D-operator applications relative to the original density.
  int level() const { return level_; }

  /// u(x) = x k(x) for x > 0.
  double tail(double x) const {
    if (is_series()) return series().tail(x);
    return chain().tail(x);
  }

  /// k(x), symmetric in x.
  double operator()(double x) const {
    const double ax = std::abs(x);
    return tail(ax) / ax;
  }

  LevyDensity with_rep(SeriesTail s, int level) const { return LevyDensity(std::move(s), name_, level); }
  LevyDensity with_rep(ClosedFormChain c) const {
    const int level = c.level();
    return LevyDensity(std::move(c), name_, level);
  }
  LevyDensity renamed(std::string name) const {
    LevyDensity out = *this;
    out.name_ = std::move(name);
    return out;
  }

 private:
  LevyDensity(std::variant<SeriesTail, ClosedFormChain> rep, std::string name, int level)
      : rep_(std::move(rep)), name_(std::move(name)), level_(level) {}

  std::variant<SeriesTail, ClosedFormChain> rep_;
  std::string name_;
  int level_ = 0;
};

namespace detail {

inline double cos_minus_one(double y) {
  const double s = std::sin(0.5 * y);
  return -2.0 * s * s;
}

// Probes used for the behaviour of u at the origin.
inline constexpr double kOriginProbeFar = 1e-7;
inline constexpr double kOriginProbeNear = 1e-9;

}  // namespace detail

/// Sign of u(0+): +1, -1, or 0 when u vanishes at the origin. Exact for
/// series tails; for chains, decided from u at two points near zero (a tail
/// that does not shrink by half between them does not vanish).
inline int origin_sign(const LevyDensity& k) {
  if (k.is_series()) {
    const auto& s = k.series().tail;
    double scale = 0.0;
    for (const auto& t : s.terms()) {
      if (t.power == 0) scale += std::abs(t.coeff);
    }
    const double v = s.at_zero();
    if (std::abs(v) <= 1e-12 * scale) return 0;
    return v > 0 ? 1 : -1;
  }
  const double far = k.tail(detail::kOriginProbeFar);
  const double near = k.tail(detail::kOriginProbeNear);
  if (near == 0.0 || !(std::abs(near) >= 0.5 * std::abs(far))) return 0;
  return near > 0 ? 1 : -1;
}

/// \int_R k(x) dx; +-infinity when u(0+) != 0.
inline double total_mass(const LevyDensity& k, const QuadratureConfig& cfg = {}) {
  const int sign = origin_sign(k);
  if (sign != 0) return sign * std::numeric_limits<double>::infinity();
  if (k.is_series()) {
    // Power-0 terms cancel at the origin: Frullani gives -sum c log b.
    detail::NeumaierSum acc;
    for (const auto& t : k.series().tail.terms()) {
      if (t.power == 0) {
        acc.add(-t.coeff * std::log(t.rate));
      } else {
        double v = t.coeff;
        for (int j = 1; j <= t.power; ++j) v /= t.rate;
        for (int j = 1; j < t.power; ++j) v *= j;
        acc.add(v);
      }
    }
    return 2.0 * acc.value();
  }
  auto integrand = [&](double x) { return k.tail(x) / x; };
  auto tail = [&](double x) { return k.tail(x); };
  return 2.0 * integrate_half_line(integrand, tail, cfg);
}

struct Integrability {
  bool valid = false;
  double total_mass = std::numeric_limits<double>::quiet_NaN();
};

/// Whether \int min(x^2, 1) k(x) dx converges, plus the total mass when it does.
inline Integrability integrability_check(const LevyDensity& k, const QuadratureConfig& cfg = {}) {
  Integrability out;
  if (!k.is_series()) {
    // x u(x) ~ x^p near 0 must have p > -1.
    const double far = std::abs(detail::kOriginProbeFar * k.tail(detail::kOriginProbeFar));
    const double near = std::abs(detail::kOriginProbeNear * k.tail(detail::kOriginProbeNear));
    if (!std::isfinite(far) || !std::isfinite(near)) return out;
    if (far > 0.0 && near > 0.0) {
      const double p = std::log(near / far) / std::log(detail::kOriginProbeNear / detail::kOriginProbeFar);
      if (p <= -0.9) return out;
    }
    try {
      find_tail_cutoff([&](double x) { return k.tail(x); }, cfg.split_point);
    } catch (const QuadratureFailure&) {
      return out;
    }
  }
  // Series tails have positive rates and nonnegative powers: always valid.
  out.valid = true;
  out.total_mass = total_mass(k, cfg);
  return out;
}

inline void require_integrable(const LevyDensity& k, const QuadratureConfig& cfg = {}) {
  if (!integrability_check(k, cfg).valid) {
    throw NonConvergent(k.name() + ": min(x^2, 1) k(x) is not integrable");
  }
}

namespace detail {

/// 2 \int_0^inf (cos tx - 1) c x^{m-1} e^{-bx} dx for m >= 1, and
/// 2 \int_0^inf (cos tx - 1) c e^{-bx} / x dx = -c log(1 + t^2/b^2) for m = 0.
inline double exponent_of_term(const ExpPolyTerm& term, double t) {
  const double tau = t / term.rate;
  if (term.power == 0) return -term.coeff * std::log1p(tau * tau);
  const int m = term.power;
  const double theta = std::atan(tau);
  // Re (b - it)^{-m} b^m - 1 = cos^m(theta) cos(m theta) - 1
  const double log_cos_m = -0.5 * m * std::log1p(tau * tau);
  const double bracket = std::expm1(log_cos_m) * std::cos(m * theta) + cos_minus_one(m * theta);
  double factor = 2.0 * term.coeff;
  for (int j = 1; j < m; ++j) factor *= j / term.rate;
  factor /= term.rate;
  return factor * bracket;
}

}  // namespace detail

/// \int_R (cos tx - 1) k(x) dx.
inline double lk_exponent(const LevyDensity& k, double t, const QuadratureConfig& cfg = {}) {
  t = std::abs(t);
  if (t == 0.0) return 0.0;
  if (k.is_series()) {
    detail::NeumaierSum acc;
    for (const auto& term : k.series().tail.terms()) acc.add(detail::exponent_of_term(term, t));
    if (k.series().dropped) acc.add(k.series().dropped->exponent_correction(t));
    return acc.value();
  }
  require_integrable(k, cfg);
  auto integrand = [&](double x) { return detail::cos_minus_one(t * x) / x * k.tail(x); };
  auto tail = [&](double x) { return k.tail(x); };
  return 2.0 * integrate_half_line(integrand, tail, cfg);
}

inline double char_function(const LevyDensity& k, double t, const QuadratureConfig& cfg = {}) {
  return std::exp(lk_exponent(k, t, cfg));
}

/// Levy density of phi(t) / phi(ct): tail u(x) - u(x / c).
inline LevyDensity residual_density(const LevyDensity& k, double c) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidParam("residual_density: c must lie in (0, 1)");
  if (k.is_series()) {
    SeriesTail s = k.series();
    s.tail = s.tail - dilate(s.tail, c);
    if (s.dropped) {
      const auto scales = s.dropped->scales;
      for (const auto& sc : scales) s.dropped->scales.push_back({-sc.weight, sc.scale * c});
    }
    return k.with_rep(std::move(s), k.level());
  }
  return k.with_rep(k.chain().dilated_difference(c));
}

inline LevyDensity iterated_residual(const LevyDensity& k, std::span<const double> factors) {
  LevyDensity out = k;
  for (double c : factors) out = residual_density(out, c);
  return out;
}

/// The Levy-Khintchine triple [a, sigma^2, M] with M(dx) = k(x) dx symmetric.
class IDRepresentation {
 public:
  IDRepresentation(double shift, double gaussian_var, LevyDensity density, const QuadratureConfig& cfg = {})
      : shift_(shift), gaussian_var_(gaussian_var), density_(std::move(density)) {
    if (!(gaussian_var >= 0.0)) throw InvalidParam("IDRepresentation: gaussian variance must be >= 0");
    require_integrable(density_, cfg);
  }

  double shift() const { return shift_; }
  double gaussian_var() const { return gaussian_var_; }
  const LevyDensity& density() const { return density_; }

  std::complex<double> char_function(double t, const QuadratureConfig& cfg = {}) const {
    const double re = -0.5 * gaussian_var_ * t * t + lk_exponent(density_, t, cfg);
    return std::exp(std::complex<double>(re, shift_ * t));
  }

 private:
  double shift_;
  double gaussian_var_;
  LevyDensity density_;
};

}  // namespace urbanik
