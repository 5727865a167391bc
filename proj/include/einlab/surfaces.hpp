#ifndef EINLAB_SURFACES_HPP
#define EINLAB_SURFACES_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "einlab/ambient.hpp"
#include "einlab/expr.hpp"

namespace einlab {

enum class SurfaceModel { Legendrian, ParaLegendrian, AffineP };

struct DomainBox {
  double u1_lo = 0, u1_hi = 1, u2_lo = 0, u2_hi = 1;
};

struct ExcludedBall {
  double u1 = 0, u2 = 0, radius = 0;
};

template <class T>
struct SuEval {
  V3c<T> Z;
  M3c<T> frame;  // special unitary, first column Z
};

template <class T>
struct SlEval {
  V3<T> p, q;
  M3<T> frame;  // unimodular, g e1 = p, g^t q = e1
};

/// A two-parameter chart of a Legendrian surface in the 5-sphere, of a
/// para-Legendrian surface in the split quadric, or of a position-vector
/// surface with the conormal derived from it.
struct SurfaceChart {
  virtual ~SurfaceChart() = default;
  virtual std::string name() const = 0;
  virtual SurfaceModel surface_model() const = 0;
  virtual DomainBox domain() const = 0;
  virtual std::vector<ExcludedBall> excluded() const { return {}; }

  Space space() const {
    return surface_model() == SurfaceModel::Legendrian ? Space::Su3So3 : Space::Sl3So3;
  }

  virtual SuEval<double> su_eval(const std::array<double, 2>&) const {
    throw std::logic_error("not a Legendrian chart");
  }
  virtual SuEval<Jet4> su_eval(const std::array<Jet4, 2>&) const {
    throw std::logic_error("not a Legendrian chart");
  }
  virtual SlEval<double> sl_eval(const std::array<double, 2>&) const {
    throw std::logic_error("not a para-Legendrian chart");
  }
  virtual SlEval<Jet4> sl_eval(const std::array<Jet4, 2>&) const {
    throw std::logic_error("not a para-Legendrian chart");
  }
};

template <class Derived>
struct LegendrianChartBase : SurfaceChart {
  SurfaceModel surface_model() const override { return SurfaceModel::Legendrian; }
  SuEval<double> su_eval(const std::array<double, 2>& u) const override {
    return static_cast<const Derived&>(*this).template eval_t<double>(u);
  }
  SuEval<Jet4> su_eval(const std::array<Jet4, 2>& u) const override {
    return static_cast<const Derived&>(*this).template eval_t<Jet4>(u);
  }
};

template <class Derived>
struct ParaChartBase : SurfaceChart {
  SlEval<double> sl_eval(const std::array<double, 2>& u) const override {
    return static_cast<const Derived&>(*this).template eval_t<double>(u);
  }
  SlEval<Jet4> sl_eval(const std::array<Jet4, 2>& u) const override {
    return static_cast<const Derived&>(*this).template eval_t<Jet4>(u);
  }
};

// ---- small templated builders ----------------------------------------------

template <class T>
M3<T> rot_z(const T& th) {
  M3<T> r = M3<T>::identity();
  r(0, 0) = cos(th);
  r(0, 1) = -sin(th);
  r(1, 0) = sin(th);
  r(1, 1) = cos(th);
  return r;
}

template <class T>
M3<T> rot_y(const T& th) {
  M3<T> r = M3<T>::identity();
  r(0, 0) = cos(th);
  r(0, 2) = sin(th);
  r(2, 0) = -sin(th);
  r(2, 2) = cos(th);
  return r;
}

template <class T>
M3<T> boost_13(const T& th) {
  M3<T> r = M3<T>::identity();
  r(0, 0) = cosh(th);
  r(0, 2) = sinh(th);
  r(2, 0) = sinh(th);
  r(2, 2) = cosh(th);
  return r;
}

template <class T>
M3c<T> lift_const(const Eigen::Matrix3cd& m) {
  M3c<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = Cx<T>(T(m(i, j).real()), T(m(i, j).imag()));
  return r;
}

// ---- built-in Legendrian charts --------------------------------------------

/// Totally geodesic Legendrian sphere: the unit sphere of the imaginary
/// subspace, with the rotation-orbit frame.
struct LegendrianSphereChart : LegendrianChartBase<LegendrianSphereChart> {
  std::string name() const override { return "legendrian_sphere"; }
  DomainBox domain() const override { return {-M_PI, M_PI, -1.2, 1.2}; }

  template <class T>
  SuEval<T> eval_t(const std::array<T, 2>& u) const {
    T c1 = cos(u[0]), s1 = sin(u[0]), c2 = cos(u[1]), s2 = sin(u[1]);
    SuEval<T> out;
    out.Z[0] = Cx<T>(T(0.0), c1 * c2);
    out.Z[1] = Cx<T>(T(0.0), s1 * c2);
    out.Z[2] = Cx<T>(T(0.0), s2);
    Eigen::Matrix3cd d = Eigen::Matrix3cd::Zero();
    d(0, 0) = std::complex<double>(0, 1);
    d(1, 1) = 1.0;
    d(2, 2) = std::complex<double>(0, -1);
    M3<T> rot = rot_z(u[0]) * rot_y(-u[1]);
    out.frame = complexify(rot) * lift_const<T>(d);
    return out;
  }
};

/// Flat Legendrian torus: the diagonal-torus orbit of (i,i,i)/sqrt(3).
struct LegendrianTorusChart : LegendrianChartBase<LegendrianTorusChart> {
  Eigen::Matrix3cd g0;
  std::complex<double> twist;  // extra constant unitary factor on Z

  explicit LegendrianTorusChart(bool beta0 = false) : beta0_(beta0) {
    Eigen::Vector3cd z0;
    const std::complex<double> iu(0, 1);
    double r = 1.0 / std::sqrt(3.0);
    z0 << iu * r, iu * r, iu * r;
    if (beta0_) z0[0] *= iu;  // rotate by diag(i,1,1): angle shifts by pi/2
    g0 = frame_from_Z(z0);
  }

  std::string name() const override {
    return beta0_ ? "torus_beta0_control" : "legendrian_torus";
  }
  DomainBox domain() const override { return {0.0, 2.0 * M_PI, 0.0, 2.0 * M_PI}; }

  template <class T>
  SuEval<T> eval_t(const std::array<T, 2>& u) const {
    M3c<T> tor;
    tor(0, 0) = Cx<T>(cos(u[0]), sin(u[0]));
    tor(1, 1) = Cx<T>(cos(u[1]), sin(u[1]));
    T w = -(u[0] + u[1]);
    tor(2, 2) = Cx<T>(cos(w), sin(w));
    SuEval<T> out;
    out.frame = tor * lift_const<T>(g0);
    for (int i = 0; i < 3; ++i) out.Z[i] = out.frame(i, 0);
    return out;
  }

 private:
  bool beta0_ = false;
};

// ---- built-in para-Legendrian charts ----------------------------------------

/// Hyperboloid of one sheet as the rotation-boost orbit of the base pair.
struct HyperboloidChart : ParaChartBase<HyperboloidChart> {
  std::string name() const override { return "hyperboloid"; }
  SurfaceModel surface_model() const override { return SurfaceModel::ParaLegendrian; }
  DomainBox domain() const override { return {0.0, 2.0 * M_PI, -1.0, 1.0}; }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u) const {
    T c = cos(u[0]), s = sin(u[0]), ch = cosh(u[1]), sh = sinh(u[1]);
    SlEval<T> out;
    out.p = {{ch * c, ch * s, sh}};
    out.q = {{ch * c, ch * s, -sh}};
    out.frame = rot_z(u[0]) * boost_13(u[1]);
    return out;
  }
};

/// Surface of revolution with x3 (x1^2 + x2^2) constant, realized as a
/// scaling-rotation orbit.
struct HexenhutChart : ParaChartBase<HexenhutChart> {
  Eigen::Matrix3d g0;
  static constexpr double kHeight = 2.0 / (3.0 * 1.7320508075688772);

  HexenhutChart() {
    Eigen::Vector3d p0(1.0, 0.0, kHeight);
    Eigen::Vector3d q0(2.0 / 3.0, 0.0, 1.0 / (3.0 * kHeight));
    g0 = frame_from_pq(p0, q0);
  }

  std::string name() const override { return "hexenhut"; }
  SurfaceModel surface_model() const override { return SurfaceModel::ParaLegendrian; }
  DomainBox domain() const override { return {0.0, 2.0 * M_PI, -0.6, 0.6}; }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u) const {
    T c = cos(u[0]), s = sin(u[0]);
    T et = exp(u[1]), emt = exp(-u[1]);
    T e2t = et * et, em2t = emt * emt;
    SlEval<T> out;
    out.p = {{et * c, et * s, kHeight * em2t}};
    out.q = {{(2.0 / 3.0) * emt * c, (2.0 / 3.0) * emt * s, e2t / (3.0 * kHeight)}};
    M3<T> scale = M3<T>::zero();
    scale(0, 0) = et;
    scale(1, 1) = et;
    scale(2, 2) = em2t;
    M3<T> g0t;
    for (int i = 0; i < 9; ++i) g0t.e[i] = T(g0(i / 3, i % 3));
    out.frame = rot_z(u[0]) * scale * g0t;
    return out;
  }
};

/// Rank-one normal form: an affine plane pair; its hypersurface is a domain
/// of a codimension-one solvmanifold.
struct Rank1PlaneChart : ParaChartBase<Rank1PlaneChart> {
  std::string name() const override { return "rank1_plane"; }
  SurfaceModel surface_model() const override { return SurfaceModel::ParaLegendrian; }
  DomainBox domain() const override { return {-1.0, 1.0, -1.0, 1.0}; }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u) const {
    SlEval<T> out;
    out.p = {{T(1.0), u[0], T(0.0)}};
    out.q = {{T(1.0), T(0.0), u[1]}};
    out.frame = M3<T>::identity();
    out.frame(1, 0) = u[0];
    out.frame(0, 2) = -u[1];
    return out;
  }
};

// ---- ruled position-vector charts -------------------------------------------

/// Curve with two derivatives, used to rule a position-vector chart.
struct SpaceCurve {
  virtual ~SpaceCurve() = default;
  virtual std::string name() const = 0;
  virtual void at(double s, V3<double>& g, V3<double>& g1, V3<double>& g2) const = 0;
  virtual void at(const Jet4& s, V3<Jet4>& g, V3<Jet4>& g1, V3<Jet4>& g2) const = 0;
};

template <class Derived>
struct CurveBase : SpaceCurve {
  void at(double s, V3<double>& g, V3<double>& g1, V3<double>& g2) const override {
    static_cast<const Derived&>(*this).template at_t<double>(s, g, g1, g2);
  }
  void at(const Jet4& s, V3<Jet4>& g, V3<Jet4>& g1, V3<Jet4>& g2) const override {
    static_cast<const Derived&>(*this).template at_t<Jet4>(s, g, g1, g2);
  }
};

/// Unit-determinant circle lift: rules to the hyperboloid quadric.
struct CircleCurve : CurveBase<CircleCurve> {
  std::string name() const override { return "circle"; }
  template <class T>
  void at_t(const T& s, V3<T>& g, V3<T>& g1, V3<T>& g2) const {
    g = {{cos(s), sin(s), T(1.0)}};
    g1 = {{-sin(s), cos(s), T(0.0)}};
    g2 = {{-cos(s), -sin(s), T(0.0)}};
  }
};

/// Polynomial normalized curve (1, s, s^2/2); rules to a Cayley-type surface.
struct CayleyCurve : CurveBase<CayleyCurve> {
  std::string name() const override { return "cayley"; }
  template <class T>
  void at_t(const T& s, V3<T>& g, V3<T>& g1, V3<T>& g2) const {
    g = {{T(1.0), s, s * s * 0.5}};
    g1 = {{T(0.0), T(1.0), s}};
    g2 = {{T(0.0), T(0.0), T(1.0)}};
  }
};

/// Curve from three coordinate expressions in a parameter "s"; derivatives
/// are taken symbolically.
struct ExprCurve : CurveBase<ExprCurve> {
  std::array<ExprPtr, 3> c, d1, d2;
  std::string label;

  ExprCurve(const std::array<std::string, 3>& exprs, std::string lbl)
      : label(std::move(lbl)) {
    for (int i = 0; i < 3; ++i) {
      c[i] = parse_expression(exprs[i], {"s"});
      d1[i] = expr_derivative(c[i], 0);
      d2[i] = expr_derivative(d1[i], 0);
    }
  }

  std::string name() const override { return label; }
  template <class T>
  void at_t(const T& s, V3<T>& g, V3<T>& g1, V3<T>& g2) const {
    std::vector<T> v{s};
    for (int i = 0; i < 3; ++i) {
      g[i] = expr_eval(c[i], v);
      g1[i] = expr_eval(d1[i], v);
      g2[i] = expr_eval(d2[i], v);
    }
  }
};

/// Ruled chart p(u) = gamma'(u1) + u2 gamma(u1) over a curve normalized to
/// det(gamma, gamma', gamma'') = 1; the conormal is derived from p. At
/// rank-two points such a chart has centro-affine curvature -1.
struct RuledChart : ParaChartBase<RuledChart> {
  std::shared_ptr<const SpaceCurve> curve;
  DomainBox box;
  int frame_pivot = -1;

  RuledChart(std::shared_ptr<const SpaceCurve> c, DomainBox b, double norm_tol = 1e-8)
      : curve(std::move(c)), box(b) {
    // normalization precondition along the ruling parameter
    for (int i = 0; i <= 64; ++i) {
      double s = box.u1_lo + (box.u1_hi - box.u1_lo) * i / 64.0;
      V3<double> g, g1, g2;
      curve->at(s, g, g1, g2);
      double det = det3(g, g1, g2);
      if (std::abs(det - 1.0) > norm_tol)
        throw std::invalid_argument("ruled chart: curve normalization det(g,g',g'') = 1 fails");
    }
    // fix the conormal frame pivot at the domain centre
    std::array<double, 2> uc{0.5 * (box.u1_lo + box.u1_hi), 0.5 * (box.u2_lo + box.u2_hi)};
    V3<double> q = conormal_at(uc);
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      V3<double> e;
      e[k] = 1.0;
      V3<double> cr = cross(q, e);
      if (dot(cr, cr) > best) { best = dot(cr, cr); frame_pivot = k; }
    }
  }

  std::string name() const override { return "ruled:" + curve->name(); }
  SurfaceModel surface_model() const override { return SurfaceModel::AffineP; }
  DomainBox domain() const override { return box; }

  V3<double> conormal_at(const std::array<double, 2>& u) const {
    V3<double> g, g1, g2;
    curve->at(u[0], g, g1, g2);
    V3<double> p = g1 + u[1] * g;
    V3<double> pu = g2 + u[1] * g1;
    V3<double> pv = g;
    double det = det3(p, pu, pv);
    return (1.0 / det) * cross(pu, pv);
  }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u) const {
    V3<T> g, g1, g2;
    curve->at(u[0], g, g1, g2);
    SlEval<T> out;
    out.p = g1 + u[1] * g;
    V3<T> pu = g2 + u[1] * g1;
    V3<T> pv = g;
    T det = det3(out.p, pu, pv);
    V3<T> cr = cross(pu, pv);
    out.q = inverse(det) * cr;
    out.frame = frame_from_pq_t(out.p, out.q, frame_pivot);
    return out;
  }
};

// ---- expression-defined charts ----------------------------------------------

/// Legendrian chart from six coordinate expressions (real and imaginary
/// parts of the three complex components) in u1, u2.
struct ExprLegendrianChart : LegendrianChartBase<ExprLegendrianChart> {
  std::array<ExprPtr, 6> comp;  // re0, im0, re1, im1, re2, im2
  DomainBox box;
  std::vector<ExcludedBall> holes;
  std::string label;
  int pivot1 = -1, pivot2 = -1;

  ExprLegendrianChart(const std::array<std::string, 6>& exprs, DomainBox b,
                      std::vector<ExcludedBall> ex, std::string lbl)
      : box(b), holes(std::move(ex)), label(std::move(lbl)) {
    for (int i = 0; i < 6; ++i) comp[i] = parse_expression(exprs[i], {"u1", "u2"});
    std::array<double, 2> uc{0.5 * (box.u1_lo + box.u1_hi), 0.5 * (box.u2_lo + box.u2_hi)};
    V3c<double> z = z_at(uc);
    // freeze the completion pivots at the domain centre
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      double res = 1.0 - std::norm(value_of(z[k]));
      if (res > best) { best = res; pivot1 = k; }
    }
    best = -1.0;
    M3c<double> probe = frame_from_Z_t(z, pivot1, -1);
    for (int k = 0; k < 3; ++k) {
      if (k == pivot1) continue;
      double res = 1.0 - std::norm(value_of(probe(k, 0))) - std::norm(value_of(probe(k, 1)));
      if (res > best) { best = res; pivot2 = k; }
    }
  }

  std::string name() const override { return label; }
  DomainBox domain() const override { return box; }
  std::vector<ExcludedBall> excluded() const override { return holes; }

  V3c<double> z_at(const std::array<double, 2>& u) const {
    std::vector<double> v{u[0], u[1]};
    V3c<double> z;
    for (int i = 0; i < 3; ++i)
      z[i] = {expr_eval_d(comp[2 * i], v), expr_eval_d(comp[2 * i + 1], v)};
    return z;
  }

  template <class T>
  SuEval<T> eval_t(const std::array<T, 2>& u) const {
    std::vector<T> v{u[0], u[1]};
    SuEval<T> out;
    for (int i = 0; i < 3; ++i)
      out.Z[i] = Cx<T>(expr_eval(comp[2 * i], v), expr_eval(comp[2 * i + 1], v));
    out.frame = frame_from_Z_t(out.Z, pivot1, pivot2);
    return out;
  }
};

/// Para-Legendrian chart from six coordinate expressions (p then q).
struct ExprParaChart : ParaChartBase<ExprParaChart> {
  std::array<ExprPtr, 6> comp;
  DomainBox box;
  std::vector<ExcludedBall> holes;
  std::string label;
  int pivot = -1;

  ExprParaChart(const std::array<std::string, 6>& exprs, DomainBox b,
                std::vector<ExcludedBall> ex, std::string lbl)
      : box(b), holes(std::move(ex)), label(std::move(lbl)) {
    for (int i = 0; i < 6; ++i) comp[i] = parse_expression(exprs[i], {"u1", "u2"});
    std::array<double, 2> uc{0.5 * (box.u1_lo + box.u1_hi), 0.5 * (box.u2_lo + box.u2_hi)};
    std::vector<double> v{uc[0], uc[1]};
    V3<double> q;
    for (int i = 0; i < 3; ++i) q[i] = expr_eval_d(comp[3 + i], v);
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      V3<double> e;
      e[k] = 1.0;
      V3<double> cr = cross(q, e);
      if (dot(cr, cr) > best) { best = dot(cr, cr); pivot = k; }
    }
  }

  std::string name() const override { return label; }
  SurfaceModel surface_model() const override { return SurfaceModel::ParaLegendrian; }
  DomainBox domain() const override { return box; }
  std::vector<ExcludedBall> excluded() const override { return holes; }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u) const {
    std::vector<T> v{u[0], u[1]};
    SlEval<T> out;
    for (int i = 0; i < 3; ++i) out.p[i] = expr_eval(comp[i], v);
    for (int i = 0; i < 3; ++i) out.q[i] = expr_eval(comp[3 + i], v);
    out.frame = frame_from_pq_t(out.p, out.q, pivot);
    return out;
  }
};

/// Position-only chart: three expressions for p; the conormal comes from the
/// cross-product formula with symbolic first derivatives.
struct ExprAffineChart : ParaChartBase<ExprAffineChart> {
  std::array<ExprPtr, 3> comp;
  std::array<ExprPtr, 3> d1, d2;
  DomainBox box;
  std::vector<ExcludedBall> holes;
  std::string label;
  int pivot = -1;

  ExprAffineChart(const std::array<std::string, 3>& exprs, DomainBox b,
                  std::vector<ExcludedBall> ex, std::string lbl)
      : box(b), holes(std::move(ex)), label(std::move(lbl)) {
    for (int i = 0; i < 3; ++i) {
      comp[i] = parse_expression(exprs[i], {"u1", "u2"});
      d1[i] = expr_derivative(comp[i], 0);
      d2[i] = expr_derivative(comp[i], 1);
    }
    std::array<double, 2> uc{0.5 * (box.u1_lo + box.u1_hi), 0.5 * (box.u2_lo + box.u2_hi)};
    SlEval<double> e = eval_t<double>(uc, /*skip_frame=*/true);
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
      V3<double> ee;
      ee[k] = 1.0;
      V3<double> cr = cross(e.q, ee);
      if (dot(cr, cr) > best) { best = dot(cr, cr); pivot = k; }
    }
  }

  std::string name() const override { return label; }
  SurfaceModel surface_model() const override { return SurfaceModel::AffineP; }
  DomainBox domain() const override { return box; }
  std::vector<ExcludedBall> excluded() const override { return holes; }

  template <class T>
  SlEval<T> eval_t(const std::array<T, 2>& u, bool skip_frame = false) const {
    std::vector<T> v{u[0], u[1]};
    SlEval<T> out;
    V3<T> pu, pv;
    for (int i = 0; i < 3; ++i) {
      out.p[i] = expr_eval(comp[i], v);
      pu[i] = expr_eval(d1[i], v);
      pv[i] = expr_eval(d2[i], v);
    }
    T det = det3(out.p, pu, pv);
    out.q = inverse(det) * cross(pu, pv);
    if (!skip_frame) out.frame = frame_from_pq_t(out.p, out.q, pivot);
    return out;
  }
};

// ---- chart operations --------------------------------------------------------

inline std::array<Jet4, 2> seed_surface(double u1, double u2) {
  return {Jet4::variable(u1, 0), Jet4::variable(u2, 1)};
}

namespace chartops {

inline const V3c<double>& value(const V3c<double>& v) { return v; }
inline const V3<double>& value(const V3<double>& v) { return v; }

inline V3c<double> value(const V3c<Jet4>& v) {
  V3c<double> r;
  for (int i = 0; i < 3; ++i) r[i] = {v[i].re.v, v[i].im.v};
  return r;
}
inline V3<double> value(const V3<Jet4>& v) {
  V3<double> r;
  for (int i = 0; i < 3; ++i) r[i] = v[i].v;
  return r;
}
inline V3c<double> deriv(const V3c<Jet4>& v, int slot) {
  V3c<double> r;
  for (int i = 0; i < 3; ++i) r[i] = {v[i].re.d[slot], v[i].im.d[slot]};
  return r;
}
inline V3<double> deriv(const V3<Jet4>& v, int slot) {
  V3<double> r;
  for (int i = 0; i < 3; ++i) r[i] = v[i].d[slot];
  return r;
}
inline V3<double> second(const V3<Jet4>& v, int a, int b) {
  V3<double> r;
  for (int i = 0; i < 3; ++i) r[i] = v[i].hess(a, b);
  return r;
}

inline Eigen::Vector3cd to_eigen(const V3c<double>& v) {
  Eigen::Vector3cd r;
  for (int i = 0; i < 3; ++i) r[i] = {v[i].re, v[i].im};
  return r;
}
inline Eigen::Vector3d to_eigen(const V3<double>& v) {
  Eigen::Vector3d r;
  for (int i = 0; i < 3; ++i) r[i] = v[i];
  return r;
}

}  // namespace chartops

struct LegendrianResiduals {
  double unit_norm = 0;  // | |Z|^2 - 1 |
  double contact = 0;    // max_j | Re <iZ, dZ_j> |
};

inline LegendrianResiduals legendrian_residual(const SurfaceChart& chart, double u1,
                                               double u2) {
  auto ev = chart.su_eval(seed_surface(u1, u2));
  LegendrianResiduals r;
  Eigen::Vector3cd z = chartops::to_eigen(chartops::value(ev.Z));
  r.unit_norm = std::abs(z.squaredNorm() - 1.0);
  const std::complex<double> iu(0, 1);
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector3cd zj = chartops::to_eigen(chartops::deriv(ev.Z, j));
    double c = ((iu * z).dot(zj)).real();  // Eigen dot conjugates the left factor
    r.contact = std::max(r.contact, std::abs(c));
  }
  return r;
}

struct LegendrianAngle {
  double beta = 0;     // in [0, pi)
  double abs_det = 0;  // side channel: should be 1 for Legendrian charts
};

/// Angle of det(Z, Z1, Z2) mod pi for a real-orthonormalized tangent frame.
inline LegendrianAngle legendrian_angle(const SurfaceChart& chart, double u1, double u2) {
  LegendrianResiduals res = legendrian_residual(chart, u1, u2);
  if (res.unit_norm > 1e-6 || res.contact > 1e-6)
    throw std::invalid_argument("legendrian_angle: chart is not Legendrian at this point");

  auto ev = chart.su_eval(seed_surface(u1, u2));
  Eigen::Vector3cd z = chartops::to_eigen(chartops::value(ev.Z));
  Eigen::Vector3cd z1 = chartops::to_eigen(chartops::deriv(ev.Z, 0));
  Eigen::Vector3cd z2 = chartops::to_eigen(chartops::deriv(ev.Z, 1));

  auto redot = [](const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
    return (a.dot(b)).real();
  };
  double n1 = std::sqrt(redot(z1, z1));
  if (n1 < 1e-10) throw std::invalid_argument("legendrian_angle: rank-deficient tangent");
  Eigen::Vector3cd t1 = z1 / n1;
  Eigen::Vector3cd t2 = z2 - redot(z2, t1) * t1;
  double n2 = t2.norm();
  if (n2 < 1e-10) throw std::invalid_argument("legendrian_angle: rank-deficient tangent");
  t2 /= std::sqrt(redot(t2, t2));

  Eigen::Matrix3cd m;
  m.col(0) = z;
  m.col(1) = t1;
  m.col(2) = t2;
  std::complex<double> det = m.determinant();
  LegendrianAngle out;
  out.abs_det = std::abs(det);
  if (std::abs(out.abs_det - 1.0) > 1e-6)
    throw std::invalid_argument("legendrian_angle: |det| far from 1 (non-Legendrian input)");
  double arg = std::arg(det);
  out.beta = std::fmod(arg, M_PI);
  if (out.beta < 0) out.beta += M_PI;
  return out;
}

inline double angle_mod_pi_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return std::min(d, M_PI - d);
}

struct ParaResiduals {
  double normalization = 0;  // |<p,q> - 1|
  double contact1 = 0;       // max(|<p, d1 q>|, |<q, d1 p>|)
  double contact2 = 0;
  double special = 0;        // |det(p,dp) + det(q,dq)|
};

inline ParaResiduals para_residuals(const SurfaceChart& chart, double u1, double u2) {
  auto ev = chart.sl_eval(seed_surface(u1, u2));
  Eigen::Vector3d p = chartops::to_eigen(chartops::value(ev.p));
  Eigen::Vector3d q = chartops::to_eigen(chartops::value(ev.q));
  Eigen::Vector3d p1 = chartops::to_eigen(chartops::deriv(ev.p, 0));
  Eigen::Vector3d p2 = chartops::to_eigen(chartops::deriv(ev.p, 1));
  Eigen::Vector3d q1 = chartops::to_eigen(chartops::deriv(ev.q, 0));
  Eigen::Vector3d q2 = chartops::to_eigen(chartops::deriv(ev.q, 1));

  ParaResiduals r;
  r.normalization = std::abs(p.dot(q) - 1.0);
  r.contact1 = std::max(std::abs(p.dot(q1)), std::abs(q.dot(p1)));
  r.contact2 = std::max(std::abs(p.dot(q2)), std::abs(q.dot(p2)));
  double dp = p.dot(p1.cross(p2));
  double dq = q.dot(q1.cross(q2));
  r.special = std::abs(dp + dq);
  return r;
}

/// Numerical rank of the 3x2 Jacobian of the position vector.
inline int dp_rank(const SurfaceChart& chart, double u1, double u2,
                   double rel_threshold = 1e-8) {
  auto ev = chart.sl_eval(seed_surface(u1, u2));
  Eigen::Matrix<double, 3, 2> j;
  j.col(0) = chartops::to_eigen(chartops::deriv(ev.p, 0));
  j.col(1) = chartops::to_eigen(chartops::deriv(ev.p, 1));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  double smax = svd.singularValues().maxCoeff();
  if (smax == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > rel_threshold * smax) ++rank;
  return rank;
}

/// Conormal from the position chart: det(p, p1, p2) q = p1 x p2.
inline Eigen::Vector3d q_from_p(const SurfaceChart& chart, double u1, double u2) {
  auto ev = chart.sl_eval(seed_surface(u1, u2));
  Eigen::Vector3d p = chartops::to_eigen(chartops::value(ev.p));
  Eigen::Vector3d p1 = chartops::to_eigen(chartops::deriv(ev.p, 0));
  Eigen::Vector3d p2 = chartops::to_eigen(chartops::deriv(ev.p, 1));
  Eigen::Matrix<double, 3, 2> j;
  j.col(0) = p1;
  j.col(1) = p2;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j);
  if (svd.singularValues()[1] <= 1e-8 * std::max(1.0, svd.singularValues()[0]))
    throw std::invalid_argument("q_from_p: position chart is rank deficient");
  double det = p.dot(p1.cross(p2));
  if (std::abs(det) < 1e-8)
    throw std::invalid_argument("q_from_p: tangent plane passes through the origin");
  return p1.cross(p2) / det;
}

/// Centro-affine curvature K <p,n>^-4 with an arbitrary Euclidean structure.
inline double centro_affine_curvature(const SurfaceChart& chart, double u1, double u2) {
  auto ev = chart.sl_eval(seed_surface(u1, u2));
  Eigen::Vector3d p = chartops::to_eigen(chartops::value(ev.p));
  Eigen::Vector3d p1 = chartops::to_eigen(chartops::deriv(ev.p, 0));
  Eigen::Vector3d p2 = chartops::to_eigen(chartops::deriv(ev.p, 1));
  Eigen::Vector3d p11 = chartops::to_eigen(chartops::second(ev.p, 0, 0));
  Eigen::Vector3d p12 = chartops::to_eigen(chartops::second(ev.p, 0, 1));
  Eigen::Vector3d p22 = chartops::to_eigen(chartops::second(ev.p, 1, 1));

  Eigen::Vector3d nn = p1.cross(p2);
  double area = nn.norm();
  if (area < 1e-10) throw std::invalid_argument("centro_affine_curvature: rank-deficient chart");
  Eigen::Vector3d n = nn / area;

  Eigen::Matrix2d first, secondf;
  first << p1.dot(p1), p1.dot(p2), p1.dot(p2), p2.dot(p2);
  secondf << p11.dot(n), p12.dot(n), p12.dot(n), p22.dot(n);
  double support = p.dot(n);
  if (std::abs(support) < 1e-10)
    throw std::invalid_argument("centro_affine_curvature: tangent plane through the origin");
  double gauss = secondf.determinant() / first.determinant();
  return gauss / std::pow(support, 4);
}

inline std::shared_ptr<SurfaceChart> ruled_affine_sphere(
    std::shared_ptr<const SpaceCurve> curve, DomainBox box) {
  return std::make_shared<RuledChart>(std::move(curve), box);
}

/// Built-in surface factory. Accepted names: legendrian_sphere,
/// legendrian_torus, torus_beta0_control, hyperboloid, hexenhut, rank1_plane,
/// ruled:circle, ruled:cayley.
inline std::shared_ptr<SurfaceChart> builtin_surface(const std::string& name) {
  if (name == "legendrian_sphere") return std::make_shared<LegendrianSphereChart>();
  if (name == "legendrian_torus") return std::make_shared<LegendrianTorusChart>(false);
  if (name == "torus_beta0_control") return std::make_shared<LegendrianTorusChart>(true);
  if (name == "hyperboloid") return std::make_shared<HyperboloidChart>();
  if (name == "hexenhut") return std::make_shared<HexenhutChart>();
  if (name == "rank1_plane") return std::make_shared<Rank1PlaneChart>();
  if (name == "ruled:circle")
    return std::make_shared<RuledChart>(std::make_shared<CircleCurve>(),
                                        DomainBox{-1.2, 1.2, -1.0, 1.0});
  if (name == "ruled:cayley")
    return std::make_shared<RuledChart>(std::make_shared<CayleyCurve>(),
                                        DomainBox{-0.5, 0.5, -0.5, 0.5});
  throw std::invalid_argument("unknown surface '" + name + "'");
}

}  // namespace einlab

#endif
