#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace finsler {

// Bivariate Taylor polynomial in (dr, ds) truncated at total degree D.
//
// Coefficients are Taylor-normalized: coeff(a, b) = d^a/dr^a d^b/ds^b f / (a! b!)
// at the base point (r0, s0), so products are plain truncated Cauchy products.
template <int D>
class TaylorJet {
  static_assert(D >= 0, "jet degree must be non-negative");

 public:
  static constexpr int kDegree = D;
  static constexpr std::size_t kSize = static_cast<std::size_t>((D + 1) * (D + 2) / 2);

  constexpr TaylorJet() = default;
  constexpr TaylorJet(double value, double r0, double s0) : r0_(r0), s0_(s0) { c_[0] = value; }

  static constexpr TaylorJet constant(double value, double r0, double s0) { return {value, r0, s0}; }

  static constexpr TaylorJet variable_r(double r0, double s0) {
    TaylorJet j(r0, r0, s0);
    if constexpr (D >= 1) j.coeff(1, 0) = 1.0;
    return j;
  }

  static constexpr TaylorJet variable_s(double r0, double s0) {
    TaylorJet j(s0, r0, s0);
    if constexpr (D >= 1) j.coeff(0, 1) = 1.0;
    return j;
  }

  static constexpr std::size_t index(int a, int b) {
    const int k = a + b;
    return static_cast<std::size_t>(k * (k + 1) / 2 + b);
  }

  constexpr double coeff(int a, int b) const { return c_[index(a, b)]; }
  constexpr double& coeff(int a, int b) { return c_[index(a, b)]; }

  // d^a/dr^a d^b/ds^b at the base point.
  constexpr double partial(int a, int b) const { return coeff(a, b) * factorial(a) * factorial(b); }

  constexpr double value() const { return c_[0]; }
  constexpr double r0() const { return r0_; }
  constexpr double s0() const { return s0_; }
  constexpr const std::array<double, kSize>& coefficients() const { return c_; }

  // True when every coefficient beyond the constant term is zero.
  constexpr bool is_constant() const {
    for (std::size_t i = 1; i < kSize; ++i)
      if (c_[i] != 0.0) return false;
    return true;
  }

  // Lowest total order holding a non-finite coefficient, or -1.
  int first_nonfinite_order() const {
    for (int k = 0; k <= D; ++k)
      for (int b = 0; b <= k; ++b)
        if (!std::isfinite(coeff(k - b, b))) return k;
    return -1;
  }

  constexpr TaylorJet operator-() const {
    TaylorJet out = *this;
    for (auto& v : out.c_) v = -v;
    return out;
  }

  constexpr TaylorJet& operator+=(const TaylorJet& o) {
    for (std::size_t i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  constexpr TaylorJet& operator-=(const TaylorJet& o) {
    for (std::size_t i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  constexpr TaylorJet& operator*=(double k) {
    for (auto& v : c_) v *= k;
    return *this;
  }
  constexpr TaylorJet& operator+=(double k) {
    c_[0] += k;
    return *this;
  }

  friend constexpr TaylorJet operator+(TaylorJet a, const TaylorJet& b) { return a += b; }
  friend constexpr TaylorJet operator-(TaylorJet a, const TaylorJet& b) { return a -= b; }
  friend constexpr TaylorJet operator+(TaylorJet a, double k) { return a += k; }
  friend constexpr TaylorJet operator+(double k, TaylorJet a) { return a += k; }
  friend constexpr TaylorJet operator-(TaylorJet a, double k) { return a += -k; }
  friend constexpr TaylorJet operator-(double k, const TaylorJet& a) { return (-a) += k; }
  friend constexpr TaylorJet operator*(TaylorJet a, double k) { return a *= k; }
  friend constexpr TaylorJet operator*(double k, TaylorJet a) { return a *= k; }
  friend constexpr TaylorJet operator/(TaylorJet a, double k) { return a *= (1.0 / k); }

  friend constexpr TaylorJet operator*(const TaylorJet& f, const TaylorJet& g) {
    TaylorJet out(0.0, f.r0_, f.s0_);
    for (int a1 = 0; a1 <= D; ++a1)
      for (int b1 = 0; a1 + b1 <= D; ++b1) {
        const double fc = f.coeff(a1, b1);
        if (fc == 0.0) continue;
        for (int a2 = 0; a1 + b1 + a2 <= D; ++a2)
          for (int b2 = 0; a1 + b1 + a2 + b2 <= D; ++b2)
            out.coeff(a1 + a2, b1 + b2) += fc * g.coeff(a2, b2);
      }
    return out;
  }
  constexpr TaylorJet& operator*=(const TaylorJet& o) { return *this = *this * o; }

  // f(g) for a univariate f given by its Taylor coefficients at g.value():
  // series[k] = f^(k)(g0) / k!. Horner in the nilpotent increment g - g0.
  friend constexpr TaylorJet compose(const std::array<double, D + 1>& series, const TaylorJet& g) {
    TaylorJet h = g;
    h.c_[0] = 0.0;
    TaylorJet out(series[D], g.r0_, g.s0_);
    for (int k = D - 1; k >= 0; --k) {
      out = out * h;
      out.c_[0] += series[k];
    }
    return out;
  }

  // Jet of the r-partial, one degree lower.
  constexpr TaylorJet<(D > 0 ? D - 1 : 0)> d_r() const {
    static_assert(D >= 1, "cannot differentiate a degree-0 jet");
    TaylorJet<D - 1> out(0.0, r0_, s0_);
    for (int a = 0; a < D; ++a)
      for (int b = 0; a + b < D; ++b) out.coeff(a, b) = (a + 1) * coeff(a + 1, b);
    return out;
  }

  // Jet of the s-partial, one degree lower.
  constexpr TaylorJet<(D > 0 ? D - 1 : 0)> d_s() const {
    static_assert(D >= 1, "cannot differentiate a degree-0 jet");
    TaylorJet<D - 1> out(0.0, r0_, s0_);
    for (int a = 0; a < D; ++a)
      for (int b = 0; a + b < D; ++b) out.coeff(a, b) = (b + 1) * coeff(a, b + 1);
    return out;
  }

  template <int E>
  constexpr TaylorJet<E> truncate() const {
    static_assert(E <= D, "truncation cannot raise the degree");
    TaylorJet<E> out(0.0, r0_, s0_);
    for (int a = 0; a <= E; ++a)
      for (int b = 0; a + b <= E; ++b) out.coeff(a, b) = coeff(a, b);
    return out;
  }

  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

 private:
  template <int>
  friend class TaylorJet;

  std::array<double, kSize> c_{};
  double r0_ = 0.0;
  double s0_ = 0.0;
};

// Degree used for every phi evaluation: fourth-order mixed partials of phi
// feed Q_ss and Q_rs.
inline constexpr int kJetDegree = 4;
using Jet4 = TaylorJet<kJetDegree>;

// Taylor series of elementary functions at x0, truncated at degree D.
// series[k] = f^(k)(x0) / k!.
namespace series {

template <int D>
std::array<double, D + 1> exp(double x0) {
  std::array<double, D + 1> out{};
  const double e = std::exp(x0);
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) f *= k;
    out[k] = e / f;
  }
  return out;
}

template <int D>
std::array<double, D + 1> log(double x0) {
  std::array<double, D + 1> out{};
  out[0] = std::log(x0);
  double p = 1.0;
  for (int k = 1; k <= D; ++k) {
    p *= x0;
    out[k] = ((k % 2) ? 1.0 : -1.0) / (k * p);
  }
  return out;
}

// sqrt(x0 + h) = sqrt(x0) * sum binom(1/2, k) (h / x0)^k
template <int D>
std::array<double, D + 1> sqrt(double x0) {
  std::array<double, D + 1> out{};
  const double root = std::sqrt(x0);
  double binom = 1.0;
  double p = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) {
      binom *= (0.5 - (k - 1)) / k;
      p *= x0;
    }
    out[k] = root * binom / p;
  }
  return out;
}

template <int D>
std::array<double, D + 1> sin(double x0) {
  std::array<double, D + 1> out{};
  const double sv = std::sin(x0), cv = std::cos(x0);
  const double cycle[4] = {sv, cv, -sv, -cv};
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) f *= k;
    out[k] = cycle[k % 4] / f;
  }
  return out;
}

template <int D>
std::array<double, D + 1> cos(double x0) {
  std::array<double, D + 1> out{};
  const double sv = std::sin(x0), cv = std::cos(x0);
  const double cycle[4] = {cv, -sv, -cv, sv};
  double f = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) f *= k;
    out[k] = cycle[k % 4] / f;
  }
  return out;
}

template <int D>
std::array<double, D + 1> reciprocal(double x0) {
  std::array<double, D + 1> out{};
  double p = x0;
  for (int k = 0; k <= D; ++k) {
    out[k] = ((k % 2) ? -1.0 : 1.0) / p;
    p *= x0;
  }
  return out;
}

// Only valid away from 0.
template <int D>
std::array<double, D + 1> abs(double x0) {
  std::array<double, D + 1> out{};
  out[0] = std::abs(x0);
  if constexpr (D >= 1) out[1] = x0 < 0.0 ? -1.0 : 1.0;
  return out;
}

}  // namespace series

template <int D>
TaylorJet<D> exp(const TaylorJet<D>& g) { return compose(series::exp<D>(g.value()), g); }
template <int D>
TaylorJet<D> log(const TaylorJet<D>& g) { return compose(series::log<D>(g.value()), g); }
template <int D>
TaylorJet<D> sqrt(const TaylorJet<D>& g) { return compose(series::sqrt<D>(g.value()), g); }
template <int D>
TaylorJet<D> sin(const TaylorJet<D>& g) { return compose(series::sin<D>(g.value()), g); }
template <int D>
TaylorJet<D> cos(const TaylorJet<D>& g) { return compose(series::cos<D>(g.value()), g); }
template <int D>
TaylorJet<D> reciprocal(const TaylorJet<D>& g) { return compose(series::reciprocal<D>(g.value()), g); }

template <int D>
TaylorJet<D> operator/(const TaylorJet<D>& f, const TaylorJet<D>& g) { return f * reciprocal(g); }
template <int D>
TaylorJet<D> operator/(double k, const TaylorJet<D>& g) { return reciprocal(g) * k; }

// Non-negative integer power by repeated squaring.
template <int D>
TaylorJet<D> ipow(TaylorJet<D> base, unsigned long n) {
  TaylorJet<D> out(1.0, base.r0(), base.s0());
  while (n) {
    if (n & 1UL) out *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return out;
}

}  // namespace finsler
