#ifndef EINLAB_AMBIENT_HPP
#define EINLAB_AMBIENT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "einlab/lie_core.hpp"
#include "einlab/smallmat.hpp"

namespace einlab {

enum class Space { Su3So3, Sl3So3 };

inline std::string space_name(Space s) {
  return s == Space::Su3So3 ? "su3so3" : "sl3so3";
}

inline Model space_model(Space s) {
  return s == Space::Su3So3 ? Model::Su3 : Model::Sl3R;
}

inline double ambient_einstein_constant(Space s) {
  static const double c_su = model_einstein_constant(Model::Su3);
  static const double c_sl = model_einstein_constant(Model::Sl3R);
  return s == Space::Su3So3 ? c_su : c_sl;
}

// ---- points and tangent vectors ------------------------------------------

/// Point of one of the embedded model spaces: a symmetric special-unitary
/// matrix, or a pair (P, P^{-1}) with P symmetric positive definite of
/// determinant one.
struct AmbientPoint {
  Space space;
  Eigen::Matrix3cd x;       // Su3So3
  Eigen::Matrix3d P, Pinv;  // Sl3So3
};

/// Matrix-valued vector of the flat ambient space containing the model.
struct AmbientVec {
  Space space;
  Eigen::Matrix3cd v;       // Su3So3
  Eigen::Matrix3d v1, v2;   // Sl3So3

  AmbientVec operator+(const AmbientVec& o) const {
    AmbientVec r = *this;
    r.v += o.v;
    r.v1 += o.v1;
    r.v2 += o.v2;
    return r;
  }
  AmbientVec operator-(const AmbientVec& o) const {
    AmbientVec r = *this;
    r.v -= o.v;
    r.v1 -= o.v1;
    r.v2 -= o.v2;
    return r;
  }
  friend AmbientVec operator*(double s, const AmbientVec& a) {
    AmbientVec r = a;
    r.v *= s;
    r.v1 *= s;
    r.v2 *= s;
    return r;
  }
};

inline AmbientVec su_vec(const Eigen::Matrix3cd& v) {
  AmbientVec r;
  r.space = Space::Su3So3;
  r.v = v;
  r.v1.setZero();
  r.v2.setZero();
  return r;
}

inline AmbientVec sl_vec(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  AmbientVec r;
  r.space = Space::Sl3So3;
  r.v.setZero();
  r.v1 = a;
  r.v2 = b;
  return r;
}

/// Flat-ambient inner products of the two embeddings. Positive definite on
/// tangent spaces of the model; indefinite on the full pair space.
inline double ambient_inner(const AmbientVec& a, const AmbientVec& b) {
  if (a.space != b.space) throw std::invalid_argument("ambient_inner: space mismatch");
  if (a.space == Space::Su3So3) return (a.v.cwiseProduct(b.v.conjugate())).sum().real();
  return -0.5 * ((a.v1 * b.v2).trace() + (b.v1 * a.v2).trace());
}

inline double membership_residual(const AmbientPoint& pt) {
  if (pt.space == Space::Su3So3) {
    double sym = (pt.x - pt.x.transpose()).norm();
    double uni = (pt.x * pt.x.adjoint() - Eigen::Matrix3cd::Identity()).norm();
    double det = std::abs(pt.x.determinant() - 1.0);
    return std::max({sym, uni, det});
  }
  double sym = (pt.P - pt.P.transpose()).norm();
  double det = std::abs(pt.P.determinant() - 1.0);
  double inv = (pt.P * pt.Pinv - Eigen::Matrix3d::Identity()).norm();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(pt.P);
  double pos = std::max(0.0, -es.eigenvalues().minCoeff());
  return std::max({sym, det, inv, pos});
}

inline AmbientPoint base_point(Space s) {
  AmbientPoint pt;
  pt.space = s;
  pt.x = Eigen::Matrix3cd::Identity();
  pt.P = Eigen::Matrix3d::Identity();
  pt.Pinv = Eigen::Matrix3d::Identity();
  return pt;
}

// ---- embedding and group action ------------------------------------------

inline AmbientPoint embed_su(const Eigen::Matrix3cd& q, double tol = 1e-10) {
  if ((q * q.adjoint() - Eigen::Matrix3cd::Identity()).norm() > tol ||
      std::abs(q.determinant() - 1.0) > tol)
    throw std::invalid_argument("embed: matrix is not special unitary");
  AmbientPoint pt = base_point(Space::Su3So3);
  pt.x = q * q.transpose();
  return pt;
}

inline AmbientPoint embed_sl(const Eigen::Matrix3d& q, double tol = 1e-10) {
  if (std::abs(q.determinant() - 1.0) > tol)
    throw std::invalid_argument("embed: matrix is not unimodular");
  AmbientPoint pt = base_point(Space::Sl3So3);
  pt.P = q * q.transpose();
  pt.Pinv = pt.P.inverse();
  return pt;
}

inline AmbientPoint act_su(const Eigen::Matrix3cd& g, const AmbientPoint& pt) {
  AmbientPoint r = pt;
  r.x = g * pt.x * g.transpose();
  return r;
}

inline AmbientPoint act_sl(const Eigen::Matrix3d& g, const AmbientPoint& pt) {
  AmbientPoint r = pt;
  Eigen::Matrix3d gti = g.inverse().transpose();
  r.P = g * pt.P * g.transpose();
  r.Pinv = gti * pt.Pinv * g.inverse();
  return r;
}

// ---- group-element recovery (symmetric square roots) ----------------------

/// Any symmetric special-unitary x splits as x = A + iB with A, B real
/// symmetric and commuting; a joint orthogonal eigenbasis yields the
/// symmetric principal square root, which is a valid frame.
inline Eigen::Matrix3cd su_symmetric_sqrt(const Eigen::Matrix3cd& x) {
  Eigen::Matrix3d a = x.real(), b = x.imag();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ea(a);
  Eigen::Matrix3d q = ea.eigenvectors();
  Eigen::Vector3d av = ea.eigenvalues();
  // refine within clusters of a so that b is diagonal there too
  auto clusters = cluster_eigenvalues(av, 1e-8);
  for (auto [lo, hi] : clusters) {
    int w = hi - lo;
    if (w == 1) continue;
    Eigen::MatrixXd sub = q.middleCols(lo, w);
    Eigen::MatrixXd brest = sub.transpose() * b * sub;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(brest);
    q.middleCols(lo, w) = sub * eb.eigenvectors();
  }
  Eigen::Vector3d bd;
  for (int i = 0; i < 3; ++i) bd[i] = q.col(i).dot(b * q.col(i));
  Eigen::Vector3d ad;
  for (int i = 0; i < 3; ++i) ad[i] = q.col(i).dot(a * q.col(i));

  Eigen::Matrix3cd y = Eigen::Matrix3cd::Zero();
  for (int i = 0; i < 3; ++i) {
    double theta = std::atan2(bd[i], ad[i]);
    std::complex<double> half = std::exp(std::complex<double>(0.0, 0.5 * theta));
    y += half * (q.col(i) * q.col(i).transpose()).cast<std::complex<double>>();
  }
  if (y.determinant().real() < 0.0) y = -y;
  if ((y * y.transpose() - x).norm() > 1e-9)
    throw std::runtime_error("symmetric square root failed");
  return y;
}

inline Eigen::Matrix3d spd_sqrt(const Eigen::Matrix3d& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(p);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("spd_sqrt: matrix is not positive definite");
  return es.operatorSqrt();
}

/// Frame g with embed(g) == pt; determined up to right isotropy.
inline Eigen::Matrix3cd recover_frame_su(const AmbientPoint& pt) {
  return su_symmetric_sqrt(pt.x);
}
inline Eigen::Matrix3d recover_frame_sl(const AmbientPoint& pt) {
  return spd_sqrt(pt.P);
}

// ---- tangent spaces and transport ----------------------------------------

/// Base-point orthonormal tangent basis in ambient coordinates: twice the
/// calibrated p-basis of the matching algebra model.
inline std::vector<AmbientVec> base_tangent_basis(Space s) {
  const AlgebraModel& mo = model(space_model(s));
  std::vector<AmbientVec> out;
  for (int a = 0; a < mo.dim_p(); ++a) {
    Eigen::MatrixXcd t = 2.0 * mo.p_basis()[a];
    if (s == Space::Su3So3) {
      out.push_back(su_vec(t));
    } else {
      Eigen::Matrix3d tr = t.real();
      out.push_back(sl_vec(tr, -tr));
    }
  }
  return out;
}

inline AmbientVec push_tangent_su(const Eigen::Matrix3cd& g, const AmbientVec& v) {
  return su_vec(g * v.v * g.transpose());
}
inline AmbientVec push_tangent_sl(const Eigen::Matrix3d& g, const AmbientVec& v) {
  Eigen::Matrix3d gi = g.inverse();
  return sl_vec(g * v.v1 * g.transpose(), gi.transpose() * v.v2 * gi);
}

/// Orthonormal basis of the 5-dimensional tangent space at pt, pushed from
/// the base point by the supplied (or recovered) frame and re-orthonormalized.
inline std::vector<AmbientVec> tangent_basis(const AmbientPoint& pt) {
  std::vector<AmbientVec> base = base_tangent_basis(pt.space);
  std::vector<AmbientVec> out;
  if (pt.space == Space::Su3So3) {
    Eigen::Matrix3cd g = recover_frame_su(pt);
    for (const auto& v : base) out.push_back(push_tangent_su(g, v));
  } else {
    Eigen::Matrix3d g = recover_frame_sl(pt);
    for (const auto& v : base) out.push_back(push_tangent_sl(g, v));
  }
  return gram_schmidt(out, [](const AmbientVec& a, const AmbientVec& b) {
    return ambient_inner(a, b);
  });
}

inline std::vector<AmbientVec> tangent_basis_with_frame(const AmbientPoint& pt,
                                                        const Eigen::Matrix3cd& g_su,
                                                        const Eigen::Matrix3d& g_sl) {
  std::vector<AmbientVec> base = base_tangent_basis(pt.space);
  std::vector<AmbientVec> out;
  for (const auto& v : base)
    out.push_back(pt.space == Space::Su3So3 ? push_tangent_su(g_su, v)
                                            : push_tangent_sl(g_sl, v));
  return gram_schmidt(out, [](const AmbientVec& a, const AmbientVec& b) {
    return ambient_inner(a, b);
  });
}

/// Pull an ambient tangent vector back to the origin with the frame g and
/// identify it with a p-element of the matching algebra model. This is a
/// linear isometry between the ambient metric on T_x and the calibrated
/// metric on p (the factor 1/2 inverts the differential of the embedding at
/// the base point).
inline AlgebraElement transport_with_frame(const AmbientVec& v, const Eigen::Matrix3cd& g_su,
                                           const Eigen::Matrix3d& g_sl,
                                           double tangency_tol = 1e-8) {
  const std::complex<double> iu(0.0, 1.0);
  if (v.space == Space::Su3So3) {
    Eigen::Matrix3cd gi = g_su.inverse();
    Eigen::Matrix3cd w = gi * v.v * gi.transpose();
    // tangency at the base point: w lies in i * Sym0(3, R)
    double res = std::max({0.5 * (w - w.transpose()).norm(), w.real().norm(),
                           std::abs(w.trace())});
    if (res > tangency_tol * std::max(1.0, w.norm()))
      throw std::invalid_argument("transport: vector is not tangent to the model space");
    Eigen::Matrix3d s = 0.5 * (w.imag() + w.imag().transpose());
    s -= (s.trace() / 3.0) * Eigen::Matrix3d::Identity();
    return model(Model::Su3).element(0.5 * iu * s.cast<std::complex<double>>());
  }
  Eigen::Matrix3d gi = g_sl.inverse();
  Eigen::Matrix3d w1 = gi * v.v1 * gi.transpose();
  Eigen::Matrix3d w2 = g_sl.transpose() * v.v2 * g_sl;
  double res = std::max({0.5 * (w1 + w2).norm(), 0.5 * (w1 - w1.transpose()).norm(),
                         std::abs(w1.trace())});
  if (res > tangency_tol * std::max(1.0, w1.norm()))
    throw std::invalid_argument("transport: vector is not tangent to the model space");
  Eigen::Matrix3d s = 0.5 * (w1 + w1.transpose());
  s -= (s.trace() / 3.0) * Eigen::Matrix3d::Identity();
  return model(Model::Sl3R).element((0.5 * s).cast<std::complex<double>>());
}

inline AlgebraElement transport_to_origin(const AmbientPoint& pt, const AmbientVec& v,
                                          double tangency_tol = 1e-8) {
  if (pt.space != v.space) throw std::invalid_argument("transport: space mismatch");
  if (pt.space == Space::Su3So3)
    return transport_with_frame(v, recover_frame_su(pt), Eigen::Matrix3d::Identity(),
                                tangency_tol);
  return transport_with_frame(v, Eigen::Matrix3cd::Identity(), recover_frame_sl(pt),
                              tangency_tol);
}

// ---- leaf labels -----------------------------------------------------------

/// Label of a totally geodesic leaf: a unit Z (mod sign) or a pair (p, q)
/// with <p,q> = 1 (mod simultaneous sign).
struct LeafLabel {
  Space space;
  Eigen::Vector3cd Z;
  Eigen::Vector3d p, q;
};

inline LeafLabel make_su_label(Eigen::Vector3cd z, double tol = 1e-10) {
  if (std::abs(z.norm() - 1.0) > tol)
    throw std::invalid_argument("leaf label: Z must be unit");
  // sign convention: first coordinate of significant modulus has positive
  // real part (positive imaginary part when purely imaginary)
  for (int i = 0; i < 3; ++i) {
    if (std::abs(z[i]) > 1e-8) {
      double key = std::abs(z[i].real()) > 1e-10 ? z[i].real() : z[i].imag();
      if (key < 0) z = -z;
      break;
    }
  }
  LeafLabel l;
  l.space = Space::Su3So3;
  l.Z = z;
  l.p.setZero();
  l.q.setZero();
  return l;
}

inline LeafLabel make_sl_label(Eigen::Vector3d p, Eigen::Vector3d q, double tol = 1e-10) {
  if (std::abs(p.dot(q) - 1.0) > tol)
    throw std::invalid_argument("leaf label: <p,q> must equal 1");
  for (int i = 0; i < 3; ++i) {
    if (std::abs(p[i]) > 1e-8) {
      if (p[i] < 0) { p = -p; q = -q; }
      break;
    }
  }
  LeafLabel l;
  l.space = Space::Sl3So3;
  l.Z.setZero();
  l.p = p;
  l.q = q;
  return l;
}

// ---- templated frames ------------------------------------------------------

template <class T>
T hdot_re(const V3c<T>& a, const V3c<T>& b) {
  T acc(0.0);
  for (int i = 0; i < 3; ++i) acc += a[i].re * b[i].re + a[i].im * b[i].im;
  return acc;
}

template <class T>
Cx<T> hdot(const V3c<T>& a, const V3c<T>& b) {
  Cx<T> acc;
  for (int i = 0; i < 3; ++i) acc += a[i] * conj(b[i]);
  return acc;
}

/// Deterministic special-unitary frame with first column Z. Completion by
/// Gram-Schmidt against fixed fallback vectors, pivoting on the value part
/// (or on caller-fixed pivots, to keep a chart's frame single-branch over
/// its whole domain); the last column's phase is fixed by the determinant
/// condition.
template <class T>
M3c<T> frame_from_Z_t(const V3c<T>& z, int fixed_pivot1 = -1, int fixed_pivot2 = -1) {
  auto unit = [](int k) {
    V3c<T> e;
    e[k] = Cx<T>(T(1.0));
    return e;
  };
  // first fallback: largest residual after removing the Z-component
  int pivot = fixed_pivot1;
  double best = -1.0;
  if (pivot < 0)
    for (int k = 0; k < 3; ++k) {
      double zz = std::norm(value_of(z[k]));
      double res = 1.0 - zz;
      if (res > best) { best = res; pivot = k; }
    }
  V3c<T> c1 = unit(pivot);
  Cx<T> overlap = hdot(c1, z);
  for (int i = 0; i < 3; ++i) c1[i] -= overlap * z[i];
  T n1 = sqrt(hdot_re(c1, c1));
  for (int i = 0; i < 3; ++i) c1[i] = c1[i] / n1;

  // second fallback: largest residual against span(Z, c1)
  int pivot2 = fixed_pivot2;
  best = -1.0;
  if (pivot2 < 0)
    for (int k = 0; k < 3; ++k) {
      if (k == pivot) continue;
      V3c<T> cand = unit(k);
      Cx<T> oz = hdot(cand, z), oc = hdot(cand, c1);
      double res = 1.0 - std::norm(value_of(oz)) - std::norm(value_of(oc));
      if (res > best) { best = res; pivot2 = k; }
    }
  V3c<T> c2 = unit(pivot2);
  Cx<T> oz = hdot(c2, z), oc = hdot(c2, c1);
  for (int i = 0; i < 3; ++i) c2[i] -= oz * z[i] + oc * c1[i];
  T n2 = sqrt(hdot_re(c2, c2));
  for (int i = 0; i < 3; ++i) c2[i] = c2[i] / n2;

  M3c<T> g;
  for (int i = 0; i < 3; ++i) {
    g(i, 0) = z[i];
    g(i, 1) = c1[i];
    g(i, 2) = c2[i];
  }
  Cx<T> d = det3(g);
  for (int i = 0; i < 3; ++i) g(i, 2) = g(i, 2) * conj(d);  // |d| = 1
  return g;
}

/// Deterministic unimodular frame with g e1 = p and g^t q = e1.
template <class T>
M3<T> frame_from_pq_t(const V3<T>& p, const V3<T>& q, int fixed_pivot = -1) {
  auto unit = [](int k) {
    V3<T> e;
    e[k] = T(1.0);
    return e;
  };
  int pivot = fixed_pivot;
  double best = -1.0;
  if (pivot < 0)
    for (int k = 0; k < 3; ++k) {
      V3<T> c = cross(q, unit(k));
      double n = value_of(dot(c, c));
      if (n > best) { best = n; pivot = k; }
    }
  V3<T> b2 = cross(q, unit(pivot));
  T n2 = sqrt(dot(b2, b2));
  for (int i = 0; i < 3; ++i) b2[i] = b2[i] / n2;
  V3<T> b3 = cross(q, b2);

  M3<T> g;
  for (int i = 0; i < 3; ++i) {
    g(i, 0) = p[i];
    g(i, 1) = b2[i];
    g(i, 2) = b3[i];
  }
  T d = det3(g);
  for (int i = 0; i < 3; ++i) g(i, 2) = g(i, 2) / d;
  return g;
}

// ---- templated leaf blocks -------------------------------------------------

/// exp(i P(t)) on the lower 2x2 block, P(t) = t1 diag(1,-1) + t2 offdiag;
/// closed form via P^2 = (t1^2 + t2^2) I.
template <class T>
M3c<T> su_leaf_block(const T& t1, const T& t2) {
  T q = t1 * t1 + t2 * t2;
  T c = cos_sqrt(q), s = sinc_sqrt(q);
  M3c<T> b;
  b(0, 0) = Cx<T>(T(1.0));
  b(1, 1) = Cx<T>(c, s * t1);
  b(2, 2) = Cx<T>(c, -(s * t1));
  b(1, 2) = Cx<T>(T(0.0), s * t2);
  b(2, 1) = b(1, 2);
  return b;
}

/// exp(P(t)) on the lower 2x2 block, same generator pattern.
template <class T>
M3<T> sl_leaf_block(const T& t1, const T& t2) {
  T q = t1 * t1 + t2 * t2;
  T c = cosh_sqrt(q), s = sinhc_sqrt(q);
  M3<T> b;
  b(0, 0) = T(1.0);
  b(1, 1) = c + s * t1;
  b(2, 2) = c - s * t1;
  b(1, 2) = s * t2;
  b(2, 1) = b(1, 2);
  return b;
}

/// Halved generator versions: valid frames for the leaf points.
template <class T>
M3c<T> su_leaf_block_half(const T& t1, const T& t2) {
  return su_leaf_block(t1 * 0.5, t2 * 0.5);
}
template <class T>
M3<T> sl_leaf_block_half(const T& t1, const T& t2) {
  return sl_leaf_block(t1 * 0.5, t2 * 0.5);
}

// ---- Eigen <-> smallmat conversion (double level) --------------------------

inline M3c<double> to_small(const Eigen::Matrix3cd& m) {
  M3c<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = {m(i, j).real(), m(i, j).imag()};
  return r;
}
inline M3<double> to_small(const Eigen::Matrix3d& m) {
  M3<double> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return r;
}
inline Eigen::Matrix3cd to_eigen(const M3c<double>& m) {
  Eigen::Matrix3cd r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = {m(i, j).re, m(i, j).im};
  return r;
}
inline Eigen::Matrix3d to_eigen_real(const M3<double>& m) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return r;
}

inline Eigen::Matrix3cd frame_from_Z(const Eigen::Vector3cd& z, double tol = 1e-10) {
  if (std::abs(z.norm() - 1.0) > tol)
    throw std::invalid_argument("frame_from_Z: Z must be unit");
  V3c<double> zs;
  for (int i = 0; i < 3; ++i) zs[i] = {z[i].real(), z[i].imag()};
  return to_eigen(frame_from_Z_t(zs));
}

inline Eigen::Matrix3d frame_from_pq(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                                     double tol = 1e-10) {
  if (std::abs(p.dot(q) - 1.0) > tol)
    throw std::invalid_argument("frame_from_pq: <p,q> must equal 1");
  V3<double> ps, qs;
  for (int i = 0; i < 3; ++i) ps[i] = p[i], qs[i] = q[i];
  return to_eigen_real(frame_from_pq_t(ps, qs));
}

/// Point of the leaf with the given label at leaf-chart coordinates t.
inline AmbientPoint leaf_chart(const LeafLabel& label, double t1, double t2) {
  AmbientPoint pt = base_point(label.space);
  if (label.space == Space::Su3So3) {
    Eigen::Matrix3cd g = frame_from_Z(label.Z);
    Eigen::Matrix3cd b = to_eigen(su_leaf_block(t1, t2));
    pt.x = g * b * g.transpose();
  } else {
    Eigen::Matrix3d g = frame_from_pq(label.p, label.q);
    Eigen::Matrix3d b = to_eigen_real(sl_leaf_block(t1, t2));
    pt.P = g * b * g.transpose();
    pt.Pinv = pt.P.inverse();
  }
  return pt;
}

/// Residual of the defining leaf equation at a point: |x conj(Z) - Z| or
/// |P q - p|.
inline double leaf_equation_residual(const LeafLabel& label, const AmbientPoint& pt) {
  if (label.space == Space::Su3So3) return (pt.x * label.Z.conjugate() - label.Z).norm();
  return (pt.P * label.q - label.p).norm();
}

/// Chart coordinates of a 2x2 leaf block (inverse of the exponential
/// parametrization).
inline Eigen::Vector2d su_leaf_log(const Eigen::Matrix2cd& a) {
  double c = 0.5 * a.trace().real();
  c = std::min(1.0, std::max(-1.0, c));
  double r = std::acos(c);
  double s = r < 1e-8 ? 1.0 : std::sin(r) / r;
  Eigen::Matrix2d p = a.imag() / s;
  return {p(0, 0), p(0, 1)};
}

inline Eigen::Vector2d sl_leaf_log(const Eigen::Matrix2d& a) {
  double c = 0.5 * a.trace();
  double r = std::acosh(std::max(1.0, c));
  double s = r < 1e-8 ? 1.0 : std::sinh(r) / r;
  Eigen::Matrix2d p = (a - c * Eigen::Matrix2d::Identity()) / s;
  return {p(0, 0), p(0, 1)};
}

}  // namespace einlab

#endif
