#pragma once

// Finite sums of terms c * x^m * exp(-b x) on x > 0.
//
// Every Laplace-series tail u(x) = x k(x) = sum_k exp(-x / a_k) lives in this
// algebra, and so does every D-iterate of it, because the D-operator acts on
// tails as u -> -x u'.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

#include "urbanik/error.hpp"

namespace urbanik {

struct ExpPolyTerm {
  double coeff = 0.0;
  int power = 0;
  double rate = 1.0;
};

inline constexpr double kRateMergeTolerance = 1e-14;
inline constexpr double kCoeffDropThreshold = 1e-300;

namespace detail {

inline bool rates_match(double a, double b) {
  return std::abs(a - b) <= kRateMergeTolerance * std::max(std::abs(a), std::abs(b));
}

inline bool coeffs_match(double a, double b) {
  return std::abs(a - b) <= kRateMergeTolerance * std::max(std::abs(a), std::abs(b));
}

/// Compensated (Neumaier) running sum.
class NeumaierSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

/// Canonical exp-polynomial sum: unique (power, rate) pairs, no zero
/// coefficients, terms sorted by (rate, power). Immutable once built.
class ExpPolySum {
 public:
  ExpPolySum() = default;

  explicit ExpPolySum(std::vector<ExpPolyTerm> terms) : terms_(std::move(terms)) {
    canonicalize();
  }

  ExpPolySum(std::initializer_list<ExpPolyTerm> terms)
      : ExpPolySum(std::vector<ExpPolyTerm>(terms)) {}

  /// c * exp(-rate x)
  static ExpPolySum exponential(double coeff, double rate) {
    return ExpPolySum({ExpPolyTerm{coeff, 0, rate}});
  }

  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Continuous extension at x = 0: the sum of the power-0 coefficients.
  double at_zero() const {
    detail::NeumaierSum acc;
    for (const auto& t : terms_) {
      if (t.power == 0) acc.add(t.coeff);
    }
    return acc.value();
  }

  double operator()(double x) const;

  double max_rate() const {
    double r = 0.0;
    for (const auto& t : terms_) r = std::max(r, t.rate);
    return r;
  }

  double min_rate() const {
    double r = terms_.empty() ? 0.0 : terms_.front().rate;
    for (const auto& t : terms_) r = std::min(r, t.rate);
    return r;
  }

  /// Canonical-form equality: same shape, rates and coefficients equal up to
  /// the merge tolerance.
  friend bool operator==(const ExpPolySum& a, const ExpPolySum& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      const auto& x = a.terms_[i];
      const auto& y = b.terms_[i];
      if (x.power != y.power || !detail::rates_match(x.rate, y.rate) ||
          !detail::coeffs_match(x.coeff, y.coeff)) {
        return false;
      }
    }
    return true;
  }

  friend std::ostream& operator<<(std::ostream& os, const ExpPolySum& s) {
    os << '{';
    for (std::size_t i = 0; i < s.terms_.size(); ++i) {
      const auto& t = s.terms_[i];
      if (i) os << ", ";
      os << t.coeff << "*x^" << t.power << "*exp(-" << t.rate << "x)";
    }
    return os << '}';
  }

 private:
  void canonicalize();

  std::vector<ExpPolyTerm> terms_;
};

inline void ExpPolySum::canonicalize() {
  for (const auto& t : terms_) {
    if (!(t.rate > 0.0) || !std::isfinite(t.rate)) {
      throw InvalidParam("ExpPolySum: rates must be positive and finite");
    }
    if (t.power < 0) throw InvalidParam("ExpPolySum: powers must be nonnegative");
    if (!std::isfinite(t.coeff)) throw InvalidParam("ExpPolySum: non-finite coefficient");
  }
  std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
    return a.power != b.power ? a.power < b.power : a.rate < b.rate;
  });

  // Merge runs of equal power whose rates agree with the run's first rate.
  std::vector<ExpPolyTerm> merged;
  merged.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size();) {
    ExpPolyTerm head = terms_[i];
    detail::NeumaierSum coeff;
    std::size_t j = i;
    while (j < terms_.size() && terms_[j].power == head.power &&
           detail::rates_match(terms_[j].rate, head.rate)) {
      coeff.add(terms_[j].coeff);
      ++j;
    }
    head.coeff = coeff.value();
    if (std::abs(head.coeff) >= kCoeffDropThreshold) merged.push_back(head);
    i = j;
  }

  std::sort(merged.begin(), merged.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
    return a.rate != b.rate ? a.rate < b.rate : a.power < b.power;
  });
  terms_ = std::move(merged);
}

/// Summed in order of increasing rate, compensated.
inline double ExpPolySum::operator()(double x) const {
  if (x < 0.0 || std::isnan(x)) throw DomainError("ExpPolySum: evaluation requires x >= 0");
  if (x == 0.0) return at_zero();
  detail::NeumaierSum acc;
  for (const auto& t : terms_) {
    const double e = std::exp(-t.rate * x);
    if (e == 0.0) continue;
    acc.add(t.coeff * std::pow(x, t.power) * e);
  }
  return acc.value();
}

inline double evaluate(const ExpPolySum& s, double x) { return s(x); }

inline ExpPolySum add(const ExpPolySum& a, const ExpPolySum& b) {
  std::vector<ExpPolyTerm> all = a.terms();
  all.insert(all.end(), b.terms().begin(), b.terms().end());
  return ExpPolySum(std::move(all));
}

inline ExpPolySum scale(const ExpPolySum& s, double factor) {
  std::vector<ExpPolyTerm> out;
  if (factor == 0.0) return ExpPolySum();
  out.reserve(s.size());
  for (auto t : s.terms()) {
    t.coeff *= factor;
    out.push_back(t);
  }
  return ExpPolySum(std::move(out));
}

inline ExpPolySum operator+(const ExpPolySum& a, const ExpPolySum& b) { return add(a, b); }
inline ExpPolySum operator-(const ExpPolySum& s) { return scale(s, -1.0); }
inline ExpPolySum operator-(const ExpPolySum& a, const ExpPolySum& b) { return add(a, -b); }

/// d/dx [c x^m e^{-bx}] = c m x^{m-1} e^{-bx} - c b x^m e^{-bx}
inline ExpPolySum differentiate(const ExpPolySum& s) {
  std::vector<ExpPolyTerm> out;
  out.reserve(2 * s.size());
  for (const auto& t : s.terms()) {
    if (t.power > 0) out.push_back({t.coeff * t.power, t.power - 1, t.rate});
    out.push_back({-t.coeff * t.rate, t.power, t.rate});
  }
  return ExpPolySum(std::move(out));
}

inline ExpPolySum multiply_by_x(const ExpPolySum& s) {
  std::vector<ExpPolyTerm> out = s.terms();
  for (auto& t : out) ++t.power;
  return ExpPolySum(std::move(out));
}

/// x -> s(x / c).
inline ExpPolySum dilate(const ExpPolySum& s, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParam("dilate: factor must be positive");
  std::vector<ExpPolyTerm> out = s.terms();
  for (auto& t : out) {
    t.coeff *= std::pow(c, -t.power);
    t.rate /= c;
  }
  return ExpPolySum(std::move(out));
}

/// Exact: sum c m! / b^{m+1}.
inline double integrate_zero_inf(const ExpPolySum& s) {
  detail::NeumaierSum acc;
  for (const auto& t : s.terms()) {
    double v = t.coeff / t.rate;
    for (int j = 1; j <= t.power; ++j) v *= j / t.rate;
    acc.add(v);
  }
  return acc.value();
}

/// One application of the D-operator on tails: u -> -x u'.
inline ExpPolySum d_step(const ExpPolySum& u) { return -multiply_by_x(differentiate(u)); }

}  // namespace urbanik
