#ifndef EINLAB_JET_HPP
#define EINLAB_JET_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace einlab {

/// Second-order forward-mode dual number in N variables.
///
/// Carries a value, the gradient and the full (symmetric) Hessian through
/// arithmetic, so evaluating a chart with Jet arguments yields analytic
/// first and second partial derivatives at machine precision.
template <int N>
struct Jet {
  double v = 0.0;
  std::array<double, N> d{};
  std::array<double, N * N> h{};

  Jet() = default;
  Jet(double value) : v(value) {}

  static Jet variable(double value, int index) {
    Jet j(value);
    j.d[index] = 1.0;
    return j;
  }

  double& hess(int a, int b) { return h[a * N + b]; }
  double hess(int a, int b) const { return h[a * N + b]; }

  Jet operator-() const {
    Jet r;
    r.v = -v;
    for (int a = 0; a < N; ++a) r.d[a] = -d[a];
    for (int a = 0; a < N * N; ++a) r.h[a] = -h[a];
    return r;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int a = 0; a < N; ++a) d[a] += o.d[a];
    for (int a = 0; a < N * N; ++a) h[a] += o.h[a];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int a = 0; a < N; ++a) d[a] -= o.d[a];
    for (int a = 0; a < N * N; ++a) h[a] -= o.h[a];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        r.h[i * N + j] = a.h[i * N + j] * b.v + a.v * b.h[i * N + j] +
                         a.d[i] * b.d[j] + a.d[j] * b.d[i];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

  friend Jet operator+(double s, Jet a) { a.v += s; return a; }
  friend Jet operator+(Jet a, double s) { a.v += s; return a; }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator-(Jet a, double s) { a.v -= s; return a; }
  friend Jet operator*(double s, Jet a) {
    a.v *= s;
    for (int i = 0; i < N; ++i) a.d[i] *= s;
    for (int i = 0; i < N * N; ++i) a.h[i] *= s;
    return a;
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator/(const Jet& a, double s) { return (1.0 / s) * a; }
  friend Jet operator/(double s, const Jet& a) { return s * inverse(a); }

  friend bool operator<(const Jet& a, const Jet& b) { return a.v < b.v; }
  friend bool operator>(const Jet& a, const Jet& b) { return a.v > b.v; }
};

/// Chain rule for a scalar function with given value/first/second derivative.
template <int N>
Jet<N> compose(const Jet<N>& x, double f, double f1, double f2) {
  Jet<N> r;
  r.v = f;
  for (int i = 0; i < N; ++i) r.d[i] = f1 * x.d[i];
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      r.h[i * N + j] = f1 * x.h[i * N + j] + f2 * x.d[i] * x.d[j];
  return r;
}

template <int N>
Jet<N> inverse(const Jet<N>& x) {
  const double iv = 1.0 / x.v;
  return compose(x, iv, -iv * iv, 2.0 * iv * iv * iv);
}

template <int N> Jet<N> sin(const Jet<N>& x) {
  return compose(x, std::sin(x.v), std::cos(x.v), -std::sin(x.v));
}
template <int N> Jet<N> cos(const Jet<N>& x) {
  return compose(x, std::cos(x.v), -std::sin(x.v), -std::cos(x.v));
}
template <int N> Jet<N> sinh(const Jet<N>& x) {
  return compose(x, std::sinh(x.v), std::cosh(x.v), std::sinh(x.v));
}
template <int N> Jet<N> cosh(const Jet<N>& x) {
  return compose(x, std::cosh(x.v), std::sinh(x.v), std::cosh(x.v));
}
template <int N> Jet<N> exp(const Jet<N>& x) {
  const double e = std::exp(x.v);
  return compose(x, e, e, e);
}
template <int N> Jet<N> log(const Jet<N>& x) {
  return compose(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
template <int N> Jet<N> sqrt(const Jet<N>& x) {
  const double s = std::sqrt(x.v);
  return compose(x, s, 0.5 / s, -0.25 / (s * x.v));
}

template <int N>
Jet<N> ipow(const Jet<N>& x, long e) {
  if (e == 0) return Jet<N>(1.0);
  if (e < 0) return inverse(ipow(x, -e));
  Jet<N> r(1.0), base = x;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

template <int N>
Jet<N> pow(const Jet<N>& x, double e) {
  const double lr = std::round(e);
  if (std::abs(e - lr) < 1e-12 && std::abs(lr) < 64)
    return ipow(x, static_cast<long>(lr));
  const double f = std::pow(x.v, e);
  return compose(x, f, e * f / x.v, e * (e - 1.0) * f / (x.v * x.v));
}

// Plain-double support so templated charts instantiate with T = double.
using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sinh;
using std::sqrt;
inline double inverse(double x) { return 1.0 / x; }
inline double ipow(double x, long e) { return std::pow(x, static_cast<double>(e)); }

/// cos(sqrt(q)) as an analytic function of q, valid through q = 0.
template <class T>
T cos_sqrt(const T& q) {
  if (q > T(1e-2)) return cos(sqrt(q));
  // |q| small: truncated even series, remainder below 1e-20
  T term(1.0), sum(1.0);
  for (int k = 1; k <= 8; ++k) {
    term = term * q * (-1.0 / ((2.0 * k - 1.0) * (2.0 * k)));
    sum += term;
  }
  return sum;
}

/// sin(sqrt(q))/sqrt(q), analytic through q = 0.
template <class T>
T sinc_sqrt(const T& q) {
  if (q > T(1e-2)) { T r = sqrt(q); return sin(r) / r; }
  T term(1.0), sum(1.0);
  for (int k = 1; k <= 8; ++k) {
    term = term * q * (-1.0 / ((2.0 * k) * (2.0 * k + 1.0)));
    sum += term;
  }
  return sum;
}

/// cosh(sqrt(q)) for q >= 0, analytic through q = 0.
template <class T>
T cosh_sqrt(const T& q) {
  if (q > T(1e-2)) return cosh(sqrt(q));
  T term(1.0), sum(1.0);
  for (int k = 1; k <= 8; ++k) {
    term = term * q * (1.0 / ((2.0 * k - 1.0) * (2.0 * k)));
    sum += term;
  }
  return sum;
}

/// sinh(sqrt(q))/sqrt(q) for q >= 0, analytic through q = 0.
template <class T>
T sinhc_sqrt(const T& q) {
  if (q > T(1e-2)) { T r = sqrt(q); return sinh(r) / r; }
  T term(1.0), sum(1.0);
  for (int k = 1; k <= 8; ++k) {
    term = term * q * (1.0 / ((2.0 * k) * (2.0 * k + 1.0)));
    sum += term;
  }
  return sum;
}

using Jet2 = Jet<2>;
using Jet4 = Jet<4>;

}  // namespace einlab

#endif
