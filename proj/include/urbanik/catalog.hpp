#pragma once

// Catalog of symmetric selfdecomposable laws built from Laplace series
// X = sum a_k eta_k, plus the hyperbolic-tangent and Talacko-Zolotarev laws
// that arise as ratios of them.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "urbanik/error.hpp"
#include "urbanik/exp_poly.hpp"
#include "urbanik/levy.hpp"
#include "urbanik/quadrature.hpp"
#include "urbanik/special.hpp"

namespace urbanik {

inline constexpr int kCatalogChainOrder = 6;

struct TailMoments {
  double s2 = 0.0;  // sum_{k>K} a_k^2
  double s4 = 0.0;  // sum_{k>K} a_k^4
};

/// a_k = scale / (k + shift), k = 1, 2, ...; finite when `length` is set.
struct RateSequence {
  double scale = 1.0;
  double shift = 0.0;
  std::optional<std::uint64_t> length;

  double coefficient(std::uint64_t k) const { return scale / (static_cast<double>(k) + shift); }
  double rate(std::uint64_t k) const { return 1.0 / coefficient(k); }

  TailMoments tail(std::uint64_t K) const {
    TailMoments m;
    if (length) {
      for (std::uint64_t k = K + 1; k <= *length; ++k) {
        const double a2 = coefficient(k) * coefficient(k);
        m.s2 += a2;
        m.s4 += a2 * a2;
      }
      return m;
    }
    const double q = static_cast<double>(K) + 1.0 + shift;
    const double s2 = scale * scale;
    m.s2 = s2 * hurwitz_zeta2(q);
    m.s4 = s2 * s2 * hurwitz_zeta4(q);
    return m;
  }

  /// Var X = 2 sum a_k^2 (Var eta = 2).
  double variance() const { return 2.0 * tail(0).s2; }
};

struct LaplaceSeriesSpec {
  std::function<double(std::uint64_t)> coefficients;  // a_k, k >= 1
  std::uint64_t truncation = 1;
  std::function<TailMoments(std::uint64_t)> analytic_tail;  // optional
  std::optional<std::uint64_t> length;                       // finite sequences

  std::uint64_t terms() const { return length ? std::min(truncation, *length) : truncation; }
  bool has_dropped_terms() const { return !length || truncation < *length; }
};

/// Checks positivity, monotonicity and sum a_k^2 < inf. With an analytic
/// tail the tail must be finite and dominate the next block of partial sums;
/// without one, the Cauchy condensation terms 2^j a_{2^j}^2 must shrink
/// geometrically (ratio < 0.99 over j = 32..40).
inline void validate_series(const LaplaceSeriesSpec& spec) {
  if (!spec.coefficients) throw InvalidSequence("series: no coefficients");
  if (spec.truncation < 1) throw InvalidSequence("series: truncation must be >= 1");
  double prev = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 1; k <= spec.terms(); ++k) {
    const double a = spec.coefficients(k);
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidSequence("series: coefficients must be positive");
    if (a > prev * (1.0 + 1e-12)) throw InvalidSequence("series: coefficients must be non-increasing");
    prev = a;
  }
  if (!spec.has_dropped_terms()) return;
  if (spec.analytic_tail) {
    const TailMoments tail = spec.analytic_tail(spec.truncation);
    if (!std::isfinite(tail.s2) || tail.s2 < 0.0) throw InvalidSequence("series: analytic tail is not finite");
    double block = 0.0;
    for (std::uint64_t k = spec.truncation + 1; k <= 2 * spec.truncation; ++k) {
      block += spec.coefficients(k) * spec.coefficients(k);
    }
    if (block > tail.s2 * (1.0 + 1e-9) + 1e-300) {
      throw InvalidSequence("series: analytic tail is smaller than the partial sums it bounds");
    }
    return;
  }
  auto condensed = [&](int j) {
    const double k = std::ldexp(1.0, j);
    const double a = spec.coefficients(static_cast<std::uint64_t>(k));
    return k * a * a;
  };
  for (int j = 32; j < 40; ++j) {
    const double c0 = condensed(j);
    const double c1 = condensed(j + 1);
    if (c0 > 0.0 && !(c1 < 0.99 * c0)) throw InvalidSequence("series: sum of a_k^2 diverges");
  }
}

/// Levy density of the truncated series: tail sum_{k<=K} exp(-x / a_k),
/// carrying the analytic moments of the dropped terms when available.
inline LevyDensity series_density(const LaplaceSeriesSpec& spec, std::string name = "series") {
  validate_series(spec);
  std::vector<ExpPolyTerm> terms;
  terms.reserve(spec.terms());
  for (std::uint64_t k = 1; k <= spec.terms(); ++k) terms.push_back({1.0, 0, 1.0 / spec.coefficients(k)});
  std::optional<DroppedTail> dropped;
  if (spec.has_dropped_terms() && spec.analytic_tail) {
    const TailMoments m = spec.analytic_tail(spec.truncation);
    DroppedTail d;
    d.s2 = m.s2;
    d.s4 = m.s4;
    dropped = d;
  }
  return LevyDensity::from_series(ExpPolySum(std::move(terms)), std::move(dropped), std::move(name));
}

/// prod_{k<=K} 1 / (1 + (a_k t)^2), times exp(-t^2 s2 + t^4 s4 / 2) for the
/// dropped terms when the analytic tail is known.
inline double product_cf(const LaplaceSeriesSpec& spec, double t) {
  validate_series(spec);
  if (t == 0.0) return 1.0;
  detail::NeumaierSum log_phi;
  for (std::uint64_t k = spec.terms(); k >= 1; --k) {
    const double at = spec.coefficients(k) * t;
    log_phi.add(-std::log1p(at * at));
  }
  if (spec.has_dropped_terms() && spec.analytic_tail) {
    const TailMoments m = spec.analytic_tail(spec.truncation);
    const double t2 = t * t;
    log_phi.add(-t2 * m.s2 + 0.5 * t2 * t2 * m.s4);
  }
  return std::exp(log_phi.value());
}

struct CatalogParams {
  std::optional<double> alpha;
  std::optional<double> c;
};

struct DistributionSpec {
  std::string name;
  std::map<std::string, double> params;
  std::optional<RateSequence> rate_sequence;
  std::function<double(double)> cf_closed;
  LevyDensity density = LevyDensity::from_series({});
  std::optional<std::function<double(double)>> bdcf_closed;
  std::string cf_formula;
  std::string class_verdict;  // known Urbanik placement, e.g. "L2 \ L3"
  /// Hand-derived closed forms of D^1, D^2, ... (densities, x > 0), used to
  /// cross-check the chain.
  std::vector<std::function<double(double)>> reference_forms;

  std::string label() const {
    if (params.empty()) return name;
    std::ostringstream os;
    os << name << '(';
    bool first = true;
    for (const auto& [key, value] : params) {
      os << (first ? "" : ", ") << key << '=' << value;
      first = false;
    }
    os << ')';
    return os.str();
  }

  LaplaceSeriesSpec series(std::uint64_t truncation) const {
    if (!rate_sequence) throw InvalidParam(name + " has no Laplace-series representation");
    LaplaceSeriesSpec s;
    const RateSequence seq = *rate_sequence;
    s.coefficients = [seq](std::uint64_t k) { return seq.coefficient(k); };
    s.truncation = truncation;
    s.analytic_tail = [seq](std::uint64_t K) { return seq.tail(K); };
    s.length = seq.length;
    return s;
  }
};

namespace detail {

inline constexpr double pi = std::numbers::pi;

template <class F>
ClosedFormChain make_chain(std::string name, F f) {
  return ClosedFormChain(std::make_shared<const ChainBase>(std::move(name), f, kCatalogChainOrder));
}

/// sinh(a) / sinh(b) for 0 <= a <= b without overflow.
inline double sinh_ratio(double a, double b) {
  if (b < 1.0) return std::sinh(a) / std::sinh(b);
  return std::exp(a - b) * (-std::expm1(-2.0 * a)) / (-std::expm1(-2.0 * b));
}

inline double x_over_sinh(double t) {
  t = std::abs(t);
  if (t == 0.0) return 1.0;
  return t < 1.0 ? t / std::sinh(t) : 2.0 * t * std::exp(-t) / (-std::expm1(-2.0 * t));
}

/// t coth t, even, equal to 1 at 0.
inline double x_coth(double t) {
  t = std::abs(t);
  if (t == 0.0) return 1.0;
  return t / std::tanh(t);
}

inline double csch(double z) { return 1.0 / std::sinh(z); }
inline double coth(double z) { return 1.0 / std::tanh(z); }

// D^1..D^4 of the hyperbolic-sine density in closed form.
inline double sinh_step(int n, double x) {
  const double X = pi * x;
  const double c = coth(X / 2);
  const double s = csch(X / 2);
  switch (n) {
    case 1:
      return pi / 4 * s * s;
    case 2:
      return pi / 4 * s * s * (X * c - 1);
    case 3:
      return pi / 8 * s * s * (2 * X * X * c * c + X * X * s * s - 6 * X * c + 2);
    case 4:
      return pi / 4 * s * s *
             (X * X * X * c * c * c - 6 * X * X * c * c - 3 * X * X * s * s + X * c * (2 * X * X * s * s + 7) - 1);
    default:
      throw InvalidParam("sinh_step: n must be 1..4");
  }
}

// D^1..D^4 of the hyperbolic-cosine density in closed form.
inline double cosh_step(int n, double x) {
  const double X = pi * x;
  const double c = coth(X / 2);
  const double s = csch(X / 2);
  switch (n) {
    case 1:
      return pi / 4 * std::cosh(X / 2) * s * s;
    case 2:
      return pi / 8 * s * (X * c * c - 2 * c + X * s * s);
    case 3:
      return pi / 16 * s * (X * X * c * c * c + c * (5 * X * X * s * s + 4) - 6 * X * (c * c + s * s));
    case 4: {
      const double c2 = c * c;
      const double s2 = s * s;
      return pi / 32 * s *
             (X * X * X * (c2 * c2 + 18 * c2 * s2 + 5 * s2 * s2) - X * X * (12 * c2 * c + 60 * c * s2) +
              28 * X * (c2 + s2) - 8 * c);
    }
    default:
      throw InvalidParam("cosh_step: n must be 1..4");
  }
}

inline double require_param(const std::optional<double>& v, const char* dist, const char* param) {
  if (!v) throw InvalidParam(std::string(dist) + " requires parameter " + param);
  return *v;
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"laplace",  "sinh",
                                              "cosh",     "tanh",
                                              "logistic", "generalized_logistic",
                                              "talacko_zolotarev"};
  return names;
}

inline DistributionSpec catalog_get(std::string_view name, const CatalogParams& params = {}) {
  using detail::pi;
  DistributionSpec spec;
  spec.name = std::string(name);

  if (name == "laplace") {
    spec.rate_sequence = RateSequence{1.0, 0.0, 1};
    spec.cf_closed = [](double t) { return 1.0 / (1.0 + t * t); };
    spec.density = LevyDensity::from_series(ExpPolySum::exponential(1.0, 1.0), std::nullopt, "laplace");
    spec.bdcf_closed = [](double t) { return std::exp(-2.0 * t * t / (1.0 + t * t)); };
    spec.cf_formula = "1/(1+t^2)";
    spec.class_verdict = "L0 \\ L1";
    spec.reference_forms = {[](double x) { return std::exp(-x); }};
  } else if (name == "sinh") {
    spec.rate_sequence = RateSequence{1.0 / pi, 0.0, std::nullopt};
    spec.cf_closed = detail::x_over_sinh;
    spec.density = LevyDensity::from_chain(detail::make_chain("sinh", [](auto x) {
      using std::expm1;
      return 1.0 / expm1(pi * x);
    }));
    spec.bdcf_closed = [](double t) { return std::exp(1.0 - detail::x_coth(t)); };
    spec.cf_formula = "t/sinh(t)";
    spec.class_verdict = "L2 \\ L3";
    for (int n = 1; n <= 4; ++n) spec.reference_forms.push_back([n](double x) { return detail::sinh_step(n, x); });
  } else if (name == "cosh") {
    spec.rate_sequence = RateSequence{1.0 / pi, -0.5, std::nullopt};
    spec.cf_closed = [](double t) { return 1.0 / std::cosh(t); };
    spec.density = LevyDensity::from_chain(detail::make_chain("cosh", [](auto x) {
      using std::exp;
      using std::expm1;
      return exp(-0.5 * pi * x) / (-expm1(-pi * x));
    }));
    spec.bdcf_closed = [](double t) { return std::exp(-t * std::tanh(t)); };
    spec.cf_formula = "1/cosh(t)";
    spec.class_verdict = "L2 \\ L3";
    for (int n = 1; n <= 4; ++n) spec.reference_forms.push_back([n](double x) { return detail::cosh_step(n, x); });
  } else if (name == "tanh") {
    spec.cf_closed = [](double t) { return t == 0.0 ? 1.0 : std::tanh(t) / t; };
    spec.density = LevyDensity::from_chain(detail::make_chain("tanh", [](auto x) {
      using std::exp;
      const auto e = exp(-0.5 * pi * x);
      return e / (1.0 + e);
    }));
    spec.bdcf_closed = [](double t) {
      if (t == 0.0) return 1.0;
      return std::exp(detail::x_over_sinh(2.0 * t) - 1.0);
    };
    spec.cf_formula = "tanh(t)/t";
    spec.class_verdict = "L0 \\ L1";
    spec.reference_forms = {[](double x) {
      const double sech = 1.0 / std::cosh(pi * x / 4);
      return pi / 8 * sech * sech;
    }};
  } else if (name == "logistic") {
    const double alpha = detail::require_param(params.alpha, "logistic", "alpha");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParam("logistic: alpha must be > 0");
    spec.params["alpha"] = alpha;
    spec.rate_sequence = RateSequence{1.0 / pi, alpha - 1.0, std::nullopt};
    spec.cf_closed = [alpha](double t) { return gamma_ratio_modulus_sq(alpha, t / pi); };
    spec.density = LevyDensity::from_chain(detail::make_chain("logistic", [alpha](auto x) {
      using std::exp;
      using std::expm1;
      return exp(-alpha * pi * x) / (-expm1(-pi * x));
    }));
    spec.cf_formula = "|Gamma(alpha+it/pi)/Gamma(alpha)|^2";
    spec.class_verdict = "L1 (at least)";
    spec.reference_forms = {[alpha](double x) {
      const double q = -std::expm1(-pi * x);
      return pi * std::exp(-alpha * pi * x) * (alpha + (1.0 - alpha) * std::exp(-pi * x)) / (q * q);
    }};
  } else if (name == "generalized_logistic") {
    const double alpha = detail::require_param(params.alpha, "generalized_logistic", "alpha");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParam("generalized_logistic: alpha must be > 0");
    spec.params["alpha"] = alpha;
    spec.rate_sequence = RateSequence{1.0, alpha - 1.0, std::nullopt};
    spec.cf_closed = [alpha](double t) { return gamma_ratio_modulus_sq(alpha, t); };
    spec.density = LevyDensity::from_chain(detail::make_chain("generalized_logistic", [alpha](auto x) {
      using std::exp;
      using std::expm1;
      return exp(-alpha * x) / (-expm1(-x));
    }));
    spec.cf_formula = "|Gamma(alpha+it)/Gamma(alpha)|^2";
    spec.class_verdict = "L1 (at least)";
  } else if (name == "talacko_zolotarev") {
    const double c = detail::require_param(params.c, "talacko_zolotarev", "c");
    if (!(c > 0.0 && c < 1.0)) throw InvalidParam("talacko_zolotarev: c must lie in (0, 1)");
    spec.params["c"] = c;
    spec.cf_closed = [c](double t) {
      t = std::abs(t);
      return t == 0.0 ? 1.0 : detail::sinh_ratio(c * t, t) / c;
    };
    const auto base = catalog_get("sinh").density;
    spec.density = residual_density(base, c).renamed("talacko_zolotarev");
    spec.bdcf_closed = [c](double t) { return std::exp(detail::x_coth(c * t) - detail::x_coth(t)); };
    spec.cf_formula = "sinh(ct)/(c sinh(t))";
    spec.class_verdict = "L1 (at least)";
  } else {
    throw UnknownDistribution("unknown distribution '" + std::string(name) + "'");
  }
  return spec;
}

/// The law with characteristic function phi(t) / phi(ct).
inline DistributionSpec residual_spec(const DistributionSpec& spec, double c) {
  if (!(c > 0.0 && c < 1.0)) throw InvalidParam("residual_spec: c must lie in (0, 1)");
  DistributionSpec out;
  out.name = spec.name + "_residual";
  out.params = spec.params;
  out.params["c"] = c;
  const auto cf = spec.cf_closed;
  out.cf_closed = [cf, c](double t) { return cf(t) / cf(c * t); };
  out.density = residual_density(spec.density, c);
  out.cf_formula = "phi(t)/phi(ct)";
  out.class_verdict = "";
  return out;
}

struct GammaIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
};

/// \int_0^inf (cos tx - 1) e^{-alpha pi x} / (x (1 - e^{-pi x})) dx by
/// quadrature, against log|Gamma(alpha + it/pi)| - log Gamma(alpha).
inline GammaIdentity gamma_identity_check(double alpha, double t, const QuadratureConfig& cfg = {}) {
  using detail::pi;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParam("gamma_identity_check: alpha must be > 0");
  auto weight = [alpha](double x) { return std::exp(-alpha * pi * x) / (-std::expm1(-pi * x)); };
  auto integrand = [&](double x) {
    const double s = std::sin(0.5 * t * x);
    return -2.0 * s * s / x * weight(x);
  };
  GammaIdentity out;
  out.lhs = t == 0.0 ? 0.0 : integrate_half_line(integrand, weight, cfg);
  out.rhs = complex_log_gamma({alpha, t / pi}).real() - log_gamma(alpha);
  out.abs_diff = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace urbanik
