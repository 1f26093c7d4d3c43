#pragma once

// Truncated Taylor series ("jets") for exact derivatives of closed-form tails.
//
// A Jet<N> holds the Taylor coefficients a_0..a_N of f(x0 + e) in e. The
// arithmetic below propagates them exactly up to round-off, so a tail written
// once as a generic lambda yields u, u', ..., u^(N) in one evaluation.

#include <array>
#include <cmath>
#include <cstddef>

namespace urbanik {

template <int N>
class Jet {
  static_assert(N >= 0);

 public:
  static constexpr int degree = N;

  constexpr Jet() = default;
  constexpr Jet(double value) { c_[0] = value; }  // NOLINT: scalars promote

  /// The independent variable expanded at x0.
  static Jet variable(double x0) {
    Jet j(x0);
    if constexpr (N >= 1) j.c_[1] = 1.0;
    return j;
  }

  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  double value() const { return c_[0]; }
  const std::array<double, N + 1>& coefficients() const { return c_; }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i <= N; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) {
    a.c_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return a + s; }
  friend Jet operator-(Jet a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int k = 0; k <= N; ++k) {
      double s = 0.0;
      for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet q;
    for (int k = 0; k <= N; ++k) {
      double s = a.c_[k];
      for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
      q.c_[k] = s / b.c_[0];
    }
    return q;
  }
  friend Jet operator/(double s, const Jet& b) { return Jet(s) / b; }

  /// exp with a caller-supplied constant term, shared by exp and expm1.
  static Jet exp_series(const Jet& f, double value, double exp_value) {
    Jet g;
    g.c_[0] = value;
    // k g_k = sum_{j=1..k} j f_j e_{k-j}, where e is the jet of exp(f).
    std::array<double, N + 1> e{};
    e[0] = exp_value;
    for (int k = 1; k <= N; ++k) {
      double s = 0.0;
      for (int j = 1; j <= k; ++j) s += j * f.c_[j] * e[k - j];
      e[k] = s / k;
      g.c_[k] = e[k];
    }
    return g;
  }

  friend Jet exp(const Jet& f) {
    const double v = std::exp(f.c_[0]);
    return exp_series(f, v, v);
  }

  friend Jet expm1(const Jet& f) { return exp_series(f, std::expm1(f.c_[0]), std::exp(f.c_[0])); }

 private:
  std::array<double, N + 1> c_{};
};

/// Applies u -> -x u' n times to the jet of u at x0 and returns the value of
/// the n-th iterate. Each step consumes one Taylor degree.
template <int N>
double iterate_d_on_jet(const Jet<N>& u, double x0, int n) {
  std::array<double, N + 1> cur = u.coefficients();
  int len = N + 1;
  for (int step = 0; step < n; ++step) {
    std::array<double, N + 1> next{};
    // (u')_i = (i+1) a_{i+1}; then multiply by -(x0 + e).
    for (int i = 0; i + 1 < len; ++i) {
      const double d_i = (i + 1) * cur[i + 1];
      const double d_prev = i > 0 ? i * cur[i] : 0.0;
      next[i] = -(x0 * d_i + d_prev);
    }
    cur = next;
    --len;
  }
  return cur[0];
}

}  // namespace urbanik
