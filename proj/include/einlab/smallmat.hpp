#ifndef EINLAB_SMALLMAT_HPP
#define EINLAB_SMALLMAT_HPP

#include <array>
#include <complex>
#include <type_traits>

#include "einlab/jet.hpp"

namespace einlab {

/// Complex number over an arbitrary real scalar (double or Jet).
template <class T>
struct Cx {
  T re{};
  T im{};

  Cx() = default;
  Cx(const T& r) : re(r) {}
  Cx(const T& r, const T& i) : re(r), im(i) {}
  template <class U = T, class = std::enable_if_t<!std::is_same_v<U, double>>>
  Cx(double r) : re(r) {}

  friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
  friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
  friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
  friend Cx operator*(const Cx& a, const Cx& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Cx operator*(const T& s, const Cx& a) { return {s * a.re, s * a.im}; }
  friend Cx operator*(const Cx& a, const T& s) { return {a.re * s, a.im * s}; }
  friend Cx operator/(const Cx& a, const T& s) { return {a.re / s, a.im / s}; }
  Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
};

template <class T> Cx<T> conj(const Cx<T>& a) { return {a.re, -a.im}; }
template <class T> T norm2(const Cx<T>& a) { return a.re * a.re + a.im * a.im; }

template <class T>
Cx<T> operator/(const Cx<T>& a, const Cx<T>& b) {
  const T n = norm2(b);
  Cx<T> c = a * conj(b);
  return {c.re / n, c.im / n};
}

/// Fixed 3-vector over scalar or complex-of-scalar entries.
template <class S>
struct V3 {
  std::array<S, 3> e{};
  S& operator[](int i) { return e[i]; }
  const S& operator[](int i) const { return e[i]; }

  friend V3 operator+(const V3& a, const V3& b) {
    return {{a.e[0] + b.e[0], a.e[1] + b.e[1], a.e[2] + b.e[2]}};
  }
  friend V3 operator-(const V3& a, const V3& b) {
    return {{a.e[0] - b.e[0], a.e[1] - b.e[1], a.e[2] - b.e[2]}};
  }
  template <class W>
  friend V3 operator*(const W& s, const V3& a) {
    return {{s * a.e[0], s * a.e[1], s * a.e[2]}};
  }
};

/// Fixed 3x3 matrix, row major.
template <class S>
struct M3 {
  std::array<S, 9> e{};
  S& operator()(int i, int j) { return e[3 * i + j]; }
  const S& operator()(int i, int j) const { return e[3 * i + j]; }

  static M3 zero() { return M3{}; }
  static M3 identity() {
    M3 m;
    m(0, 0) = S(1.0); m(1, 1) = S(1.0); m(2, 2) = S(1.0);
    return m;
  }

  friend M3 operator+(const M3& a, const M3& b) {
    M3 r;
    for (int i = 0; i < 9; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
  }
  friend M3 operator-(const M3& a, const M3& b) {
    M3 r;
    for (int i = 0; i < 9; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
  }
  friend M3 operator*(const M3& a, const M3& b) {
    M3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        S acc = a(i, 0) * b(0, j);
        acc += a(i, 1) * b(1, j);
        acc += a(i, 2) * b(2, j);
        r(i, j) = acc;
      }
    return r;
  }
  friend V3<S> operator*(const M3& a, const V3<S>& v) {
    V3<S> r;
    for (int i = 0; i < 3; ++i)
      r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
    return r;
  }
  template <class W>
  friend M3 operator*(const W& s, const M3& a) {
    M3 r;
    for (int i = 0; i < 9; ++i) r.e[i] = s * a.e[i];
    return r;
  }
};

template <class S>
M3<S> transpose(const M3<S>& a) {
  M3<S> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

template <class T>
M3<Cx<T>> conj(const M3<Cx<T>>& a) {
  M3<Cx<T>> r;
  for (int i = 0; i < 9; ++i) r.e[i] = conj(a.e[i]);
  return r;
}

template <class S>
S trace(const M3<S>& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

template <class S>
S det3(const M3<S>& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

template <class S>
S det3(const V3<S>& a, const V3<S>& b, const V3<S>& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

template <class S>
V3<S> cross(const V3<S>& a, const V3<S>& b) {
  return {{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
           a[0] * b[1] - a[1] * b[0]}};
}

template <class T>
T dot(const V3<T>& a, const V3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Inverse of a real 3x3 via adjugate.
template <class T>
M3<T> inverse3(const M3<T>& a) {
  M3<T> adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const T d = det3(a);
  M3<T> r;
  for (int i = 0; i < 9; ++i) r.e[i] = adj.e[i] / d;
  return r;
}

template <class T>
using M3c = M3<Cx<T>>;
template <class T>
using V3c = V3<Cx<T>>;

template <class T>
M3c<T> complexify(const M3<T>& a) {
  M3c<T> r;
  for (int i = 0; i < 9; ++i) r.e[i] = Cx<T>(a.e[i]);
  return r;
}

template <class T>
M3c<T> adjoint(const M3c<T>& a) { return conj(transpose(a)); }

/// Extract plain values (and, for Jet entries, nothing else) into std::complex.
inline std::complex<double> value_of(const Cx<double>& z) { return {z.re, z.im}; }
template <int N>
std::complex<double> value_of(const Cx<Jet<N>>& z) { return {z.re.v, z.im.v}; }
inline double value_of(double x) { return x; }
template <int N>
double value_of(const Jet<N>& x) { return x.v; }

}  // namespace einlab

#endif
