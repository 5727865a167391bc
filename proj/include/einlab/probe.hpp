#ifndef EINLAB_PROBE_HPP
#define EINLAB_PROBE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "einlab/hypersurface.hpp"

namespace einlab {

/// Frame moving a surface point into the normalized configuration: the leaf
/// label goes to the base label and the orthonormalized surface tangents go
/// to the reference tangent pair. In these coordinates the singular set of
/// the swept hypersurface on the leaf is the one-parameter family
/// exp(i theta C) (compact side) or exp(theta C) (noncompact side), C the
/// off-diagonal generator.
inline Eigen::Matrix3cd normalized_su_frame(const SurfaceChart& surf, double u1, double u2,
                                            double tol = 1e-6) {
  auto ev = surf.su_eval(seed_surface(u1, u2));
  Eigen::Vector3cd z = chartops::to_eigen(chartops::value(ev.Z));
  Eigen::Vector3cd z1 = chartops::to_eigen(chartops::deriv(ev.Z, 0));
  Eigen::Vector3cd z2 = chartops::to_eigen(chartops::deriv(ev.Z, 1));
  auto redot = [](const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
    return (a.dot(b)).real();
  };
  Eigen::Vector3cd t1 = z1 / std::sqrt(redot(z1, z1));
  Eigen::Vector3cd t2 = z2 - redot(z2, t1) * t1;
  t2 /= std::sqrt(redot(t2, t2));

  const std::complex<double> iu(0, 1);
  Eigen::Matrix3cd g;
  g.col(0) = z;
  g.col(1) = t1;
  g.col(2) = -iu * t2;
  std::complex<double> d = g.determinant();
  if (d.real() < 0) {
    g.col(2) = -g.col(2);
    d = -d;
  }
  if (std::abs(d - 1.0) > tol)
    throw std::invalid_argument(
        "normalized frame: point is not in a pi/2-special Legendrian configuration");
  return g;
}

inline Eigen::Matrix3d normalized_sl_frame(const SurfaceChart& surf, double u1, double u2,
                                           double tol = 1e-6) {
  auto ev = surf.sl_eval(seed_surface(u1, u2));
  Eigen::Vector3d p = chartops::to_eigen(chartops::value(ev.p));
  Eigen::Matrix<double, 3, 2> dp, dq;
  dp.col(0) = chartops::to_eigen(chartops::deriv(ev.p, 0));
  dp.col(1) = chartops::to_eigen(chartops::deriv(ev.p, 1));
  dq.col(0) = chartops::to_eigen(chartops::deriv(ev.q, 0));
  dq.col(1) = chartops::to_eigen(chartops::deriv(ev.q, 1));

  Eigen::Matrix2d hform = dp.transpose() * dq;
  if ((hform - hform.transpose()).norm() > tol)
    throw std::invalid_argument("normalized frame: conormal pairing is not symmetric");
  hform = 0.5 * (hform + hform.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(hform);
  double hminus = es.eigenvalues()[0], hplus = es.eigenvalues()[1];
  if (!(hminus < 0 && hplus > 0))
    throw std::invalid_argument("normalized frame: pairing form is not indefinite");
  Eigen::Vector2d dplus = es.eigenvectors().col(1) / std::sqrt(hplus);
  Eigen::Vector2d dminus = es.eigenvectors().col(0) / std::sqrt(-hminus);

  Eigen::Vector3d p1 = dp * dplus, p2 = dp * dminus;
  double det0 = p.dot(p1.cross(p2));
  if (std::abs(std::abs(det0) - 1.0) > tol)
    throw std::invalid_argument(
        "normalized frame: point is not in a special para-Legendrian configuration");
  if (det0 < 0) p2 = -p2;
  Eigen::Matrix3d g;
  g.col(0) = p;
  g.col(1) = p1;
  g.col(2) = p2;
  return g;
}

struct ProbeResult {
  bool family_predicted = false;
  std::vector<double> thetas;             // scanned family parameters
  std::vector<Eigen::Vector2d> t_points;  // predicted singular points, chart coords
  double max_sigma_on_family = 0;         // detector along the predicted family
  double max_transverse_offset = 0;       // localized dips vs prediction
  double min_sigma_off_family = 1e300;    // no-drop scans
  int skipped = 0;
};

namespace probedetail {

inline double sigma_min_at(const HypersurfaceChart& chart, const std::array<double, 4>& x) {
  Eigen::Matrix4d g = first_fundamental_form(chart_derivatives(chart, x));
  double ev = sym_eigenvalues(g).minCoeff();
  return ev > 0 ? std::sqrt(ev) : 0.0;
}

// golden-section minimization of a scalar function on [lo, hi]
template <class F>
double golden_min(const F& f, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace probedetail

/// Scans the leaf over the surface point (u1, u2) for rank drops of the
/// composed chart. With a normalized frame available, the singular family is
/// predicted exactly; the scan records the detector along it and how sharply
/// transverse dips localize on it.
inline ProbeResult singular_locus_probe(const HypersurfaceChart& chart, double u1, double u2,
                                        double theta_max = 2.6, int n_theta = 33) {
  ProbeResult out;
  const bool su = chart.space() == Space::Su3So3;

  // chart frame at the surface point and its mismatch with the normalized one
  Eigen::Matrix2cd ublock;
  Eigen::Matrix2d vblock;
  if (su) {
    auto ev = chart.surface->su_eval(std::array<double, 2>{u1, u2});
    Eigen::Matrix3cd gc = to_eigen(ev.frame);
    Eigen::Matrix3cd gn = normalized_su_frame(*chart.surface, u1, u2);
    Eigen::Matrix3cd h = gc.inverse() * gn;
    if (std::abs(h(0, 0) - 1.0) > 1e-8 || h.col(0).tail(2).norm() > 1e-8 ||
        h.row(0).tail(2).norm() > 1e-8)
      throw std::runtime_error("probe: frame mismatch is not isotropic");
    ublock = h.bottomRightCorner(2, 2);
  } else {
    auto ev = chart.surface->sl_eval(std::array<double, 2>{u1, u2});
    Eigen::Matrix3d gc = to_eigen_real(ev.frame);
    Eigen::Matrix3d gn = normalized_sl_frame(*chart.surface, u1, u2);
    Eigen::Matrix3d h = gc.inverse() * gn;
    if (std::abs(h(0, 0) - 1.0) > 1e-8 || h.col(0).tail(2).norm() > 1e-8 ||
        h.row(0).tail(2).norm() > 1e-8)
      throw std::runtime_error("probe: frame mismatch is not isotropic");
    vblock = h.bottomRightCorner(2, 2);
  }
  out.family_predicted = true;

  auto t_of_theta = [&](double theta) -> std::optional<Eigen::Vector2d> {
    if (su) {
      Eigen::Matrix2cd an;
      const std::complex<double> iu(0, 1);
      an << std::cos(theta), iu * std::sin(theta), iu * std::sin(theta), std::cos(theta);
      Eigen::Matrix2cd e = ublock * an * ublock.transpose();
      Eigen::Vector2d t = su_leaf_log(e);
      // reconstruction check guards the branch cut of the log
      Eigen::Matrix2cd b = to_eigen(su_leaf_block(t[0], t[1])).bottomRightCorner(2, 2);
      if ((b - e).norm() > 1e-8) return std::nullopt;
      return t;
    }
    Eigen::Matrix2d an;
    an << std::cosh(theta), std::sinh(theta), std::sinh(theta), std::cosh(theta);
    Eigen::Matrix2d e = vblock * an * vblock.transpose();
    Eigen::Vector2d t = sl_leaf_log(e);
    Eigen::Matrix2d b = to_eigen_real(sl_leaf_block(t[0], t[1])).bottomRightCorner(2, 2);
    if ((b - e).norm() > 1e-8) return std::nullopt;
    return t;
  };

  for (int i = 0; i < n_theta; ++i) {
    double theta = -theta_max + 2.0 * theta_max * i / (n_theta - 1);
    auto t = t_of_theta(theta);
    if (!t) {
      ++out.skipped;
      continue;
    }
    out.thetas.push_back(theta);
    out.t_points.push_back(*t);
    double sig = probedetail::sigma_min_at(chart, {u1, u2, (*t)[0], (*t)[1]});
    out.max_sigma_on_family = std::max(out.max_sigma_on_family, sig);
  }

  // transverse localization at a few interior parameters
  for (double theta : {-1.3, -0.6, 0.45, 1.15}) {
    auto t0 = t_of_theta(theta);
    auto tp = t_of_theta(theta + 1e-4);
    auto tm = t_of_theta(theta - 1e-4);
    if (!t0 || !tp || !tm) continue;
    Eigen::Vector2d tangent = (*tp - *tm) / 2e-4;
    if (tangent.norm() < 1e-12) continue;
    Eigen::Vector2d nrm(-tangent[1], tangent[0]);
    nrm.normalize();
    auto f = [&](double s) {
      Eigen::Vector2d t = *t0 + s * nrm;
      return probedetail::sigma_min_at(chart, {u1, u2, t[0], t[1]});
    };
    double s_star = probedetail::golden_min(f, -0.05, 0.05, 1e-8);
    out.max_transverse_offset = std::max(out.max_transverse_offset, std::abs(s_star));
  }
  return out;
}

/// Rank-drop scan along leaf-coordinate rays; used for charts whose swept
/// hypersurface is expected to be free of singular points.
inline ProbeResult no_drop_scan(const HypersurfaceChart& chart, double u1, double u2,
                                double theta_max = 5.0, int n_theta = 101) {
  ProbeResult out;
  const double dirs[4][2] = {{1, 0}, {0, 1}, {M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2}};
  for (auto& d : dirs)
    for (int i = 0; i < n_theta; ++i) {
      double theta = -theta_max + 2.0 * theta_max * i / (n_theta - 1);
      double sig = probedetail::sigma_min_at(
          chart, {u1, u2, theta * d[0], theta * d[1]});
      out.min_sigma_off_family = std::min(out.min_sigma_off_family, sig);
    }
  return out;
}

}  // namespace einlab

#endif
