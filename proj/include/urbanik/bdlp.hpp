#pragma once

// Background driving characteristic functions psi(t) = exp[t (log phi)'(t)]
// and the decomposition identities psi(t) = psi(ct) psi_c(t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urbanik/catalog.hpp"
#include "urbanik/classify.hpp"
#include "urbanik/error.hpp"
#include "urbanik/levy.hpp"

namespace urbanik {

enum class BdcfMethod { closed, numeric_logderiv };

inline const char* to_string(BdcfMethod m) { return m == BdcfMethod::closed ? "closed" : "numeric_logderiv"; }

struct BdcfResult {
  std::vector<double> t_grid;
  std::vector<double> psi_values;
  BdcfMethod method = BdcfMethod::closed;
};

inline constexpr int kRichardsonLevels = 4;

/// (log phi)'(t) by central differences of log phi with steps h, 2h, 4h, 8h,
/// h = max(1e-5, 1e-5 |t|), combined by Richardson extrapolation.
inline double log_derivative(const std::function<double(double)>& phi, double t) {
  const double h = std::max(1e-5, 1e-5 * std::abs(t));
  double table[kRichardsonLevels];
  for (int i = 0; i < kRichardsonLevels; ++i) {
    const double step = h * std::ldexp(1.0, kRichardsonLevels - 1 - i);
    table[i] = (std::log(std::abs(phi(t + step))) - std::log(std::abs(phi(t - step)))) / (2.0 * step);
  }
  // table[i] uses step 8h / 2^i; each column removes the next even power.
  for (int col = 1; col < kRichardsonLevels; ++col) {
    const double factor = std::ldexp(1.0, 2 * col);
    for (int i = kRichardsonLevels - 1; i >= col; --i) {
      table[i] = table[i] + (table[i] - table[i - 1]) / (factor - 1.0);
    }
  }
  return table[kRichardsonLevels - 1];
}

inline double bdcf_numeric(const DistributionSpec& spec, double t) {
  if (t == 0.0) return 1.0;
  return std::exp(t * log_derivative(spec.cf_closed, t));
}

inline double bdcf(const DistributionSpec& spec, double t) {
  if (t == 0.0) return 1.0;
  if (spec.bdcf_closed) return (*spec.bdcf_closed)(t);
  return bdcf_numeric(spec, t);
}

inline BdcfResult bdcf_table(const DistributionSpec& spec, std::span<const double> t_grid, bool force_numeric = false) {
  BdcfResult out;
  out.method = (spec.bdcf_closed && !force_numeric) ? BdcfMethod::closed : BdcfMethod::numeric_logderiv;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.psi_values.reserve(t_grid.size());
  for (double t : t_grid) out.psi_values.push_back(force_numeric ? bdcf_numeric(spec, t) : bdcf(spec, t));
  return out;
}

struct DecompositionRow {
  double t = 0.0;
  double psi = 0.0;
  double psi_ct = 0.0;
  double psi_c = 0.0;
  double deviation = 0.0;
};

inline std::vector<DecompositionRow> decomposition_table(const DistributionSpec& spec, double c,
                                                         std::span<const double> t_grid) {
  const DistributionSpec residual = residual_spec(spec, c);
  std::vector<DecompositionRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    DecompositionRow r;
    r.t = t;
    r.psi = bdcf(spec, t);
    r.psi_ct = bdcf(spec, c * t);
    r.psi_c = bdcf(residual, t);
    r.deviation = std::abs(r.psi - r.psi_ct * r.psi_c);
    rows.push_back(r);
  }
  return rows;
}

/// max over the grid of |psi(t) - psi(ct) psi_c(t)|, psi_c from the residual
/// law phi(t) / phi(ct).
inline double verify_decomposition(const DistributionSpec& spec, double c, std::span<const double> t_grid) {
  double worst = 0.0;
  for (const auto& row : decomposition_table(spec, c, t_grid)) worst = std::max(worst, row.deviation);
  return worst;
}

/// Characteristic function of the driving variable built from its Levy
/// density D^1 k of the truncated series (K terms plus the analytic tail).
inline double bdrv_char_function(const DistributionSpec& spec, double t, std::uint64_t truncation = 10000) {
  const LevyDensity k = series_density(spec.series(truncation), spec.name);
  return char_function(d_operator(k, 1), t);
}

}  // namespace urbanik
