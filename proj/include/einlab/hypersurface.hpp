#ifndef EINLAB_HYPERSURFACE_HPP
#define EINLAB_HYPERSURFACE_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "einlab/surfaces.hpp"

namespace einlab {

enum class DerivativeMode { Analytic, FiniteDifference };

/// Composed four-parameter chart (u1, u2, t1, t2) -> leaf point over the
/// surface point, covering an open set of the swept hypersurface.
struct HypersurfaceChart {
  std::shared_ptr<const SurfaceChart> surface;
  DomainBox tbox;
  DerivativeMode mode = DerivativeMode::Analytic;

  Space space() const { return surface->space(); }
  Model algebra_model() const { return space_model(space()); }
};

inline HypersurfaceChart make_hypersurface(std::shared_ptr<const SurfaceChart> surf,
                                           DerivativeMode mode = DerivativeMode::Analytic) {
  HypersurfaceChart h;
  h.surface = std::move(surf);
  h.tbox = h.surface->space() == Space::Su3So3 ? DomainBox{-1.1, 1.1, -1.1, 1.1}
                                               : DomainBox{-0.9, 0.9, -0.9, 0.9};
  h.mode = mode;
  return h;
}

/// Value and first/second parameter derivatives of the composed chart at one
/// point, together with the leaf frame and label data.
struct ChartDerivs {
  Space space;
  AmbientPoint x;
  std::array<AmbientVec, 4> d;
  std::array<std::array<AmbientVec, 4>, 4> dd;
  Eigen::Matrix3cd g_pt;       // frame at the point (su)
  Eigen::Matrix3d g_pt_r;      // frame at the point (sl)
  Eigen::Vector3cd label_Z;    // su leaf label
  Eigen::Vector3d label_p, label_q;  // sl leaf label
};

namespace hyperdetail {

inline Eigen::Matrix3cd jet_value(const M3c<Jet4>& m) {
  Eigen::Matrix3cd r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = {m(i, j).re.v, m(i, j).im.v};
  return r;
}
inline Eigen::Matrix3d jet_value(const M3<Jet4>& m) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j).v;
  return r;
}
inline Eigen::Matrix3cd jet_deriv(const M3c<Jet4>& m, int a) {
  Eigen::Matrix3cd r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = {m(i, j).re.d[a], m(i, j).im.d[a]};
  return r;
}
inline Eigen::Matrix3d jet_deriv(const M3<Jet4>& m, int a) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j).d[a];
  return r;
}
inline Eigen::Matrix3cd jet_second(const M3c<Jet4>& m, int a, int b) {
  Eigen::Matrix3cd r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = {m(i, j).re.hess(a, b), m(i, j).im.hess(a, b)};
  return r;
}
inline Eigen::Matrix3d jet_second(const M3<Jet4>& m, int a, int b) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j).hess(a, b);
  return r;
}

struct SuJetPoint {
  M3c<Jet4> F;
  M3c<Jet4> frame;
  V3c<Jet4> Z;
};
struct SlJetPoint {
  M3<Jet4> F1, F2;
  M3<Jet4> frame;
  V3<Jet4> p, q;
};

inline SuJetPoint su_compose(const SurfaceChart& surf, const std::array<double, 4>& x) {
  std::array<Jet4, 2> u{Jet4::variable(x[0], 0), Jet4::variable(x[1], 1)};
  Jet4 t1 = Jet4::variable(x[2], 2), t2 = Jet4::variable(x[3], 3);
  SuJetPoint out;
  SuEval<Jet4> ev = surf.su_eval(u);
  M3c<Jet4> block = su_leaf_block(t1, t2);
  out.F = ev.frame * block * transpose(ev.frame);
  out.frame = ev.frame;
  out.Z = ev.Z;
  return out;
}

inline SlJetPoint sl_compose(const SurfaceChart& surf, const std::array<double, 4>& x) {
  std::array<Jet4, 2> u{Jet4::variable(x[0], 0), Jet4::variable(x[1], 1)};
  Jet4 t1 = Jet4::variable(x[2], 2), t2 = Jet4::variable(x[3], 3);
  SlJetPoint out;
  SlEval<Jet4> ev = surf.sl_eval(u);
  M3<Jet4> block = sl_leaf_block(t1, t2);
  out.F1 = ev.frame * block * transpose(ev.frame);
  M3<Jet4> gi = inverse3(ev.frame);
  out.F2 = transpose(gi) * sl_leaf_block(-t1, -t2) * gi;
  out.frame = ev.frame;
  out.p = ev.p;
  out.q = ev.q;
  return out;
}

inline AmbientPoint point_only(const HypersurfaceChart& chart, const std::array<double, 4>& x) {
  AmbientPoint pt = base_point(chart.space());
  if (chart.space() == Space::Su3So3) {
    auto ev = chart.surface->su_eval(std::array<double, 2>{x[0], x[1]});
    Eigen::Matrix3cd g = to_eigen(ev.frame);
    Eigen::Matrix3cd b = to_eigen(su_leaf_block(x[2], x[3]));
    pt.x = g * b * g.transpose();
  } else {
    auto ev = chart.surface->sl_eval(std::array<double, 2>{x[0], x[1]});
    Eigen::Matrix3d g = to_eigen_real(ev.frame);
    Eigen::Matrix3d b = to_eigen_real(sl_leaf_block(x[2], x[3]));
    pt.P = g * b * g.transpose();
    pt.Pinv = pt.P.inverse();
  }
  return pt;
}

}  // namespace hyperdetail

/// All first and second parameter derivatives of the composed chart.
/// Analytic mode propagates jets through the whole composition; finite
/// difference mode uses central stencils on plain evaluations (first h=1e-5,
/// second h=1e-4).
inline ChartDerivs chart_derivatives(const HypersurfaceChart& chart,
                                     const std::array<double, 4>& x) {
  using namespace hyperdetail;
  ChartDerivs out;
  out.space = chart.space();
  out.x = base_point(out.space);

  if (chart.mode == DerivativeMode::Analytic) {
    if (out.space == Space::Su3So3) {
      SuJetPoint jp = su_compose(*chart.surface, x);
      out.x.x = jet_value(jp.F);
      for (int a = 0; a < 4; ++a) out.d[a] = su_vec(jet_deriv(jp.F, a));
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) out.dd[a][b] = su_vec(jet_second(jp.F, a, b));
      Eigen::Matrix3cd g = jet_value(jp.frame);
      out.g_pt = g * to_eigen(su_leaf_block_half(x[2], x[3]));
      out.label_Z = chartops::to_eigen(chartops::value(jp.Z));
    } else {
      SlJetPoint jp = sl_compose(*chart.surface, x);
      out.x.P = jet_value(jp.F1);
      out.x.Pinv = jet_value(jp.F2);
      for (int a = 0; a < 4; ++a)
        out.d[a] = sl_vec(jet_deriv(jp.F1, a), jet_deriv(jp.F2, a));
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          out.dd[a][b] = sl_vec(jet_second(jp.F1, a, b), jet_second(jp.F2, a, b));
      Eigen::Matrix3d g = jet_value(jp.frame);
      out.g_pt_r = g * to_eigen_real(sl_leaf_block_half(x[2], x[3]));
      out.label_p = chartops::to_eigen(chartops::value(jp.p));
      out.label_q = chartops::to_eigen(chartops::value(jp.q));
    }
    return out;
  }

  // finite differences of plain chart evaluations
  const double h1 = 1e-5, h2 = 1e-4;
  auto at = [&](const std::array<double, 4>& y) { return point_only(chart, y); };
  out.x = at(x);
  auto diff = [&](const AmbientPoint& a, const AmbientPoint& b, double scale) {
    if (out.space == Space::Su3So3) return scale * (su_vec(a.x) - su_vec(b.x));
    return scale * (sl_vec(a.P, a.Pinv) - sl_vec(b.P, b.Pinv));
  };
  for (int a = 0; a < 4; ++a) {
    std::array<double, 4> xp = x, xm = x;
    xp[a] += h1;
    xm[a] -= h1;
    out.d[a] = diff(at(xp), at(xm), 1.0 / (2 * h1));
  }
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      AmbientVec second;
      if (a == b) {
        // (f(x+h) - 2 f(x) + f(x-h)) / h^2
        std::array<double, 4> xp = x, xm = x;
        xp[a] += h2;
        xm[a] -= h2;
        second = diff(at(xp), out.x, 1.0 / (h2 * h2)) +
                 diff(at(xm), out.x, 1.0 / (h2 * h2));
      } else {
        std::array<double, 4> xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[a] += h2; xpp[b] += h2;
        xpm[a] += h2; xpm[b] -= h2;
        xmp[a] -= h2; xmp[b] += h2;
        xmm[a] -= h2; xmm[b] -= h2;
        second = diff(at(xpp), at(xpm), 1.0 / (4 * h2 * h2)) -
                 diff(at(xmp), at(xmm), 1.0 / (4 * h2 * h2));
      }
      out.dd[a][b] = second;
      out.dd[b][a] = second;
    }
  if (out.space == Space::Su3So3) {
    auto ev = chart.surface->su_eval(std::array<double, 2>{x[0], x[1]});
    Eigen::Matrix3cd g = to_eigen(ev.frame);
    out.g_pt = g * to_eigen(su_leaf_block_half(x[2], x[3]));
    out.label_Z = chartops::to_eigen(chartops::value(ev.Z));
  } else {
    auto ev = chart.surface->sl_eval(std::array<double, 2>{x[0], x[1]});
    Eigen::Matrix3d g = to_eigen_real(ev.frame);
    out.g_pt_r = g * to_eigen_real(sl_leaf_block_half(x[2], x[3]));
    out.label_p = chartops::to_eigen(chartops::value(ev.p));
    out.label_q = chartops::to_eigen(chartops::value(ev.q));
  }
  return out;
}

/// Gram matrix of the four chart tangents in the ambient metric.
inline Eigen::Matrix4d first_fundamental_form(const ChartDerivs& cd) {
  Eigen::Matrix4d g;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      g(a, b) = ambient_inner(cd.d[a], cd.d[b]);
      g(b, a) = g(a, b);
    }
  return g;
}

inline Eigen::Matrix4d first_fundamental_form(const HypersurfaceChart& chart,
                                              const std::array<double, 4>& x) {
  return first_fundamental_form(chart_derivatives(chart, x));
}

/// The predicted unit normal of the swept hypersurface in ambient form.
inline AmbientVec formula_normal(const ChartDerivs& cd) {
  const double r6 = 1.0 / std::sqrt(6.0);
  if (cd.space == Space::Su3So3) {
    const std::complex<double> iu(0, 1);
    Eigen::Matrix3cd zz = cd.label_Z * cd.label_Z.transpose();
    return su_vec(r6 * iu * (cd.x.x - 3.0 * zz));
  }
  Eigen::Vector3d d;
  d << -2.0, 1.0, 1.0;
  Eigen::Matrix3d dm = d.asDiagonal();
  Eigen::Matrix3d gi = cd.g_pt_r.inverse();
  return sl_vec(r6 * cd.g_pt_r * dm * cd.g_pt_r.transpose(),
                -r6 * gi.transpose() * dm * gi);
}

/// Full per-point verification record of the composed chart.
struct SampleEval {
  std::array<double, 4> x;
  ChartDerivs cd;
  double membership = 0;
  Eigen::Matrix4d G;
  double gram_min_eig = 0;
  double sigma4 = 0;  // smallest singular value of the tangent coefficient matrix

  std::vector<AmbientVec> tb;             // orthonormal tangent basis of the model space
  Eigen::Matrix<double, 4, 5> tangents;   // raw chart tangents in tb coordinates
  Eigen::Matrix4d onb_from_raw;           // E_i = sum_a A(i,a) dF_a ; rows indexed by E
  Eigen::Matrix<double, 4, 5> onb;        // E_i in tb coordinates (rows)

  Eigen::Matrix<double, 5, 1> xi;         // unit normal in tb coordinates
  AmbientVec xi_amb;
  double normal_formula_dev = 0;

  Eigen::Matrix4d S;   // shape operator in the orthonormal basis (symmetric)
  double H = 0;
  Eigen::Vector4d lambda;  // eigenvalues of S, ascending
  Eigen::Matrix4d J;   // normal Jacobi operator restricted to the tangent space
  Eigen::Vector4d alpha;
  double C_est = 0;
  double eq3_residual = 0;
  Eigen::Matrix4d Ric;
  double einstein_residual = 0;
  int gauss_rank = 0;
  double leaf_geodesy = 0;
  double xi_parallel = 0;
  double leaf_curvature = 0;
  double kahler = 0;
  bool kahler_skipped = false;
  double lambda_product = 0;   // product of the two leading-|lambda| curvatures
  double lambda_sep = 0;       // separation of the two nonzero principal curvatures
};

/// Evaluates every per-point quantity. Throws when the chart is rank
/// deficient at x (singular point of the swept hypersurface).
inline SampleEval evaluate_sample(const HypersurfaceChart& chart,
                                  const std::array<double, 4>& x,
                                  double rank_tol = 1e-8) {
  SampleEval s;
  s.x = x;
  s.cd = chart_derivatives(chart, x);
  s.membership = membership_residual(s.cd.x);
  s.G = first_fundamental_form(s.cd);
  s.gram_min_eig = sym_eigenvalues(s.G).minCoeff();

  s.tb = tangent_basis_with_frame(s.cd.x, s.cd.g_pt, s.cd.g_pt_r);
  for (int a = 0; a < 4; ++a)
    for (int k = 0; k < 5; ++k) s.tangents(a, k) = ambient_inner(s.cd.d[a], s.tb[k]);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.tangents, Eigen::ComputeFullV);
  s.sigma4 = svd.singularValues()[3];
  if (s.sigma4 < rank_tol)
    throw std::runtime_error("evaluate_sample: chart is rank deficient at this point");

  // unit normal: kernel of the tangent coefficient matrix, oriented along
  // the predicted normal
  s.xi = svd.matrixV().col(4);
  AmbientVec xi_f = formula_normal(s.cd);
  Eigen::Matrix<double, 5, 1> xi_f_tb;
  for (int k = 0; k < 5; ++k) xi_f_tb[k] = ambient_inner(xi_f, s.tb[k]);
  if (s.xi.dot(xi_f_tb) < 0) s.xi = -s.xi;
  s.normal_formula_dev = (s.xi - xi_f_tb / xi_f_tb.norm()).norm();
  s.xi_amb = 0.0 * s.tb[0];
  for (int k = 0; k < 5; ++k) s.xi_amb = s.xi_amb + s.xi[k] * s.tb[k];

  // orthonormal adapted basis: leaf directions orthonormalized first, then
  // the surface directions; stored as [surface, surface, leaf, leaf]
  Eigen::Matrix<double, 4, 5> raw = s.tangents;
  Eigen::Matrix<double, 4, 5> e;
  const int order[4] = {2, 3, 0, 1};    // process t1, t2, u1, u2
  const int slot_of[4] = {2, 3, 0, 1};  // where each orthonormalized vector lands
  Eigen::Matrix4d coef = Eigen::Matrix4d::Zero();
  for (int step = 0; step < 4; ++step) {
    int src = order[step];
    Eigen::Matrix<double, 5, 1> v = raw.row(src).transpose();
    Eigen::Vector4d c = Eigen::Vector4d::Unit(src);
    for (int prev = 0; prev < step; ++prev) {
      int pslot = slot_of[prev];
      double overlap = e.row(pslot) * v;
      v -= overlap * e.row(pslot).transpose();
      c -= overlap * coef.row(pslot).transpose();
    }
    double n = v.norm();
    if (n < 1e-10)
      throw std::runtime_error("evaluate_sample: degenerate tangent frame");
    e.row(slot_of[step]) = v.transpose() / n;
    coef.row(slot_of[step]) = c.transpose() / n;
  }
  s.onb = e;
  s.onb_from_raw = coef;

  // second fundamental form and shape operator in the orthonormal basis
  Eigen::Matrix4d h_raw;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      h_raw(a, b) = ambient_inner(s.xi_amb, s.cd.dd[a][b]);
      h_raw(b, a) = h_raw(a, b);
    }
  s.S = coef * h_raw * coef.transpose();
  s.S = 0.5 * (s.S + s.S.transpose());
  s.H = s.S.trace();
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s.S);
    s.lambda = es.eigenvalues();
  }

  // transported frame and normal Jacobi operator
  const Model mo_id = chart.algebra_model();
  const AlgebraModel& mo = model(mo_id);
  std::array<AlgebraElement, 4> ep{
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(mo.n, mo.n)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(mo.n, mo.n)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(mo.n, mo.n)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(mo.n, mo.n))};
  for (int i = 0; i < 4; ++i) {
    AmbientVec v = 0.0 * s.tb[0];
    for (int k = 0; k < 5; ++k) v = v + s.onb(i, k) * s.tb[k];
    ep[i] = transport_with_frame(v, s.cd.g_pt, s.cd.g_pt_r);
  }
  AlgebraElement xi_p = transport_with_frame(s.xi_amb, s.cd.g_pt, s.cd.g_pt_r);

  for (int i = 0; i < 4; ++i) {
    AlgebraElement ri = curvature(ep[i], xi_p, xi_p);
    for (int j = i; j < 4; ++j) {
      s.J(i, j) = mo.inner_p(ri.m, ep[j].m);
      s.J(j, i) = s.J(i, j);
    }
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s.J);
    s.alpha = es.eigenvalues();
  }

  // Gauss-equation quantities with the model constant
  const double c_model = ambient_einstein_constant(chart.space());
  s.eq3_residual = (s.J - (-s.S * s.S + s.H * s.S)).norm();
  s.C_est = (s.J + s.S * s.S - s.H * s.S).trace() / 4.0;
  s.Ric = c_model * Eigen::Matrix4d::Identity() - s.J + s.H * s.S - s.S * s.S;
  s.einstein_residual =
      (s.Ric - c_model * Eigen::Matrix4d::Identity()).norm() / 2.0;

  // Gauss map rank: span of the shape-operator image and the isotropy orbit
  // directions, measured at the origin. The detector threshold follows the
  // derivative accuracy of the chart mode.
  {
    const double rank_threshold =
        chart.mode == DerivativeMode::Analytic ? 1e-8 : 1e-6;
    Eigen::MatrixXd span(mo.dim_p(), 4 + mo.dim_k());
    for (int i = 0; i < 4; ++i) {
      Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(mo.n, mo.n);
      for (int j = 0; j < 4; ++j) acc += s.S(j, i) * ep[j].m;
      span.col(i) = mo.coords_p(acc);
    }
    for (int a = 0; a < mo.dim_k(); ++a) {
      Eigen::MatrixXcd br = mo.k_basis()[a] * xi_p.m - xi_p.m * mo.k_basis()[a];
      span.col(4 + a) = mo.coords_p(br);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> rsvd(span);
    s.gauss_rank = 0;
    for (int i = 0; i < rsvd.singularValues().size(); ++i)
      if (rsvd.singularValues()[i] > rank_threshold) ++s.gauss_rank;
  }

  // leaf checks: total geodesy of the leaf inside the model space, normal
  // parallelism along the leaf, and the leaf sectional curvature
  {
    double worst = 0;
    for (int a = 2; a < 4; ++a)
      for (int b = a; b < 4; ++b) {
        Eigen::Matrix<double, 5, 1> w;
        for (int k = 0; k < 5; ++k) w[k] = ambient_inner(s.cd.dd[a][b], s.tb[k]);
        w -= (s.onb.row(2) * w) * s.onb.row(2).transpose();
        w -= (s.onb.row(3) * w) * s.onb.row(3).transpose();
        worst = std::max(worst, w.norm());
      }
    s.leaf_geodesy = worst;
    s.xi_parallel = std::max(
        {std::abs(s.S(2, 0)), std::abs(s.S(2, 1)), std::abs(s.S(2, 2)),
         std::abs(s.S(2, 3)), std::abs(s.S(3, 0)), std::abs(s.S(3, 1)),
         std::abs(s.S(3, 2)), std::abs(s.S(3, 3))});
    s.leaf_curvature = curvature_quad(ep[2], ep[3], ep[3], ep[2]);
  }

  // eigenstructure bookkeeping: the two leading-|lambda| directions
  {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(s.S);
    Eigen::Vector4d ev = es.eigenvalues();
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(ev[a]) > std::abs(ev[b]); });
    int i1 = idx[0], i2 = idx[1];
    if (ev[i1] < ev[i2]) std::swap(i1, i2);  // order by value, descending
    s.lambda_product = ev[i1] * ev[i2];
    s.lambda_sep = std::abs(ev[i1] - ev[i2]);

    // curvature combinations that vanish for a parallel complex structure
    if (s.lambda_sep < 1e-6) {
      s.kahler_skipped = true;
      s.kahler = 0.0;
    } else {
      auto combine = [&](const Eigen::Vector4d& w) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(mo.n, mo.n);
        for (int j = 0; j < 4; ++j) acc += w[j] * ep[j].m;
        return AlgebraElement(mo_id, acc);
      };
      AlgebraElement x1 = combine(es.eigenvectors().col(i1));
      AlgebraElement x2 = combine(es.eigenvectors().col(i2));
      const AlgebraElement& x3 = ep[2];
      const AlgebraElement& x4 = ep[3];
      double a1 = curvature_quad(x4, x1, x1, xi_p);
      double b1 = curvature_quad(x3, x1, x2, xi_p);
      double a2 = curvature_quad(x4, x1, x2, xi_p);
      double b2 = curvature_quad(x3, x1, x1, xi_p);
      double best = 1e300;
      for (double s4 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
          double r1 = s4 * a1 + s2 * b1;
          double r2 = s4 * s2 * a2 - b2;
          best = std::min(best, std::max(std::abs(r1), std::abs(r2)));
        }
      s.kahler = best;
    }
  }
  return s;
}

// ---- spec-facing wrappers ---------------------------------------------------

inline AmbientVec unit_normal(const HypersurfaceChart& chart, const std::array<double, 4>& x) {
  return evaluate_sample(chart, x).xi_amb;
}

inline Eigen::Matrix4d shape_operator(const HypersurfaceChart& chart,
                                      const std::array<double, 4>& x) {
  return evaluate_sample(chart, x).S;
}

inline Eigen::Matrix4d jacobi_restriction(const HypersurfaceChart& chart,
                                          const std::array<double, 4>& x) {
  return evaluate_sample(chart, x).J;
}

inline Eigen::Matrix4d gauss_equation_ricci(const HypersurfaceChart& chart,
                                            const std::array<double, 4>& x) {
  return evaluate_sample(chart, x).Ric;
}

inline int gauss_map_rank(const HypersurfaceChart& chart, const std::array<double, 4>& x) {
  return evaluate_sample(chart, x).gauss_rank;
}

inline double kahler_residual(const HypersurfaceChart& chart, const std::array<double, 4>& x) {
  SampleEval s = evaluate_sample(chart, x);
  if (s.kahler_skipped)
    throw std::runtime_error("kahler_residual: principal curvatures are degenerate here");
  return s.kahler;
}

// ---- intrinsic finite-difference Ricci (independent oracle) -----------------

/// Induced metric of the chart at x, in chart coordinates.
inline Eigen::Matrix4d induced_metric(const HypersurfaceChart& chart,
                                      const std::array<double, 4>& x) {
  return first_fundamental_form(chart_derivatives(chart, x));
}

/// Intrinsic Ricci tensor from finite differences of the induced metric
/// (Christoffel symbols from first differences, their derivatives from a
/// second stencil level). Entirely independent of the ambient curvature
/// algebra and of the shape operator.
inline Eigen::Matrix4d intrinsic_ricci_fd(const HypersurfaceChart& chart,
                                          const std::array<double, 4>& x, double h) {
  auto metric = [&](const std::array<double, 4>& y) { return induced_metric(chart, y); };

  auto christoffel = [&](const std::array<double, 4>& y) {
    Eigen::Matrix4d g = metric(y);
    Eigen::Matrix4d ginv = g.inverse();
    std::array<Eigen::Matrix4d, 4> dg;
    for (int a = 0; a < 4; ++a) {
      std::array<double, 4> yp = y, ym = y;
      yp[a] += h;
      ym[a] -= h;
      dg[a] = (metric(yp) - metric(ym)) / (2 * h);
    }
    std::array<Eigen::Matrix4d, 4> gamma;  // gamma[k](i,j) = Gamma^k_ij
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double acc = 0;
          for (int l = 0; l < 4; ++l)
            acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
          gamma[k](i, j) = 0.5 * acc;
        }
    return gamma;
  };

  auto gamma0 = christoffel(x);
  std::array<std::array<Eigen::Matrix4d, 4>, 4> dgamma;  // d_a gamma[k]
  for (int a = 0; a < 4; ++a) {
    std::array<double, 4> xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    auto gp = christoffel(xp), gm = christoffel(xm);
    for (int k = 0; k < 4; ++k) dgamma[a][k] = (gp[k] - gm[k]) / (2 * h);
  }

  // Ric(j,k) = sum_i d_i Gamma^i_jk - d_j Gamma^i_ik
  //            + Gamma^i_im Gamma^m_jk - Gamma^i_jm Gamma^m_ik
  Eigen::Matrix4d ric = Eigen::Matrix4d::Zero();
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) {
      double acc = 0;
      for (int i = 0; i < 4; ++i) {
        acc += dgamma[i][i](j, k) - dgamma[j][i](i, k);
        for (int m2 = 0; m2 < 4; ++m2)
          acc += gamma0[i](i, m2) * gamma0[m2](j, k) - gamma0[i](j, m2) * gamma0[m2](i, k);
      }
      ric(j, k) = acc;
    }
  return 0.5 * (ric + ric.transpose());
}

/// Gauss-equation Ricci expressed in chart coordinates, for comparison with
/// the finite-difference oracle. With E = C * dF the orthonormal frame,
/// Ric_chart = C^{-1} Ric_onb C^{-t}.
inline Eigen::Matrix4d gauss_ricci_in_chart_basis(const SampleEval& s) {
  Eigen::Matrix4d c_inv = s.onb_from_raw.inverse();
  return c_inv * s.Ric * c_inv.transpose();
}

struct OracleComparison {
  double rel_error = 0;  // ||fd - gauss|| / ||G||
};

inline OracleComparison compare_ricci_oracles(const HypersurfaceChart& chart,
                                              const std::array<double, 4>& x, double h) {
  SampleEval s = evaluate_sample(chart, x);
  Eigen::Matrix4d fd = intrinsic_ricci_fd(chart, x, h);
  Eigen::Matrix4d ge = gauss_ricci_in_chart_basis(s);
  OracleComparison out;
  out.rel_error = (fd - ge).norm() / s.G.norm();
  return out;
}

}  // namespace einlab

#endif
