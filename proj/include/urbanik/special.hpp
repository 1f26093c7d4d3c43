#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/special_functions/polygamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "urbanik/error.hpp"

namespace urbanik {

/// Lanczos approximation parameters (Godfrey's g = 7, nine coefficients).
struct LanczosParams {
  double g = 7.0;
  std::array<double, 9> coefficients{0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
                                     771.32342877765313,      -176.61502916214059,   12.507343278686905,
                                     -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
};

inline constexpr LanczosParams kLanczos{};

namespace detail {

// Valid for Re z >= 1/2, where the Lanczos sum stays near the positive real
// axis and the principal logs below give the branch continuous from R+.
inline std::complex<double> lanczos_log_gamma(std::complex<double> z, const LanczosParams& p) {
  z -= 1.0;
  std::complex<double> sum = p.coefficients[0];
  for (std::size_t i = 1; i < p.coefficients.size(); ++i) sum += p.coefficients[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + p.g + 0.5;
  constexpr double half_log_two_pi = 0.91893853320467274178032973640562;
  return half_log_two_pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

}  // namespace detail

/// Principal-branch log Gamma(z) for Re z > 0.
inline std::complex<double> complex_log_gamma(std::complex<double> z) {
  if (!(z.real() > 0.0)) throw DomainError("complex_log_gamma: requires Re z > 0");
  if (z.real() < 0.5) return detail::lanczos_log_gamma(z + 1.0, kLanczos) - std::log(z);
  return detail::lanczos_log_gamma(z, kLanczos);
}

/// Checks the pinned Lanczos parameters against Gamma(1) = 1 and
/// Gamma(1/2) = sqrt(pi). Returns the larger absolute error in log Gamma.
inline double validate_lanczos() {
  const double e1 = std::abs(complex_log_gamma(1.0));
  const double e2 = std::abs(complex_log_gamma(0.5) - 0.5 * std::log(std::numbers::pi));
  const double worst = std::max(e1, e2);
  if (worst > 1e-13) throw Error("Lanczos parameters failed validation");
  return worst;
}

inline double log_gamma(double x) { return complex_log_gamma(x).real(); }

/// log B(a, b) for a, b > 0.
inline double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

/// |Gamma(alpha + i y) / Gamma(alpha)|^2
inline double gamma_ratio_modulus_sq(double alpha, double y) {
  return std::exp(2.0 * (complex_log_gamma({alpha, y}).real() - log_gamma(alpha)));
}

/// Density e^{alpha s} (1 + e^s)^{-2 alpha} / B(alpha, alpha).
inline double generalized_logistic_pdf(double alpha, double s) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidParam("generalized_logistic_pdf: alpha must be > 0");
  // log(1 + e^s) without overflow; the density is symmetric in s.
  const double as = std::abs(s);
  const double softplus = as + std::log1p(std::exp(-as));
  return std::exp(alpha * as - 2.0 * alpha * softplus - log_beta(alpha, alpha));
}

/// Hurwitz zeta zeta(2, q) = psi_1(q) and zeta(4, q) = psi_3(q) / 6.
inline double hurwitz_zeta2(double q) { return boost::math::trigamma(q); }
inline double hurwitz_zeta4(double q) { return boost::math::polygamma(3, q) / 6.0; }

}  // namespace urbanik
