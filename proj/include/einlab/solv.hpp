#ifndef EINLAB_SOLV_HPP
#define EINLAB_SOLV_HPP

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "einlab/root_system.hpp"

namespace einlab {

/// Metric solvable Lie algebra a + n with an orthonormal basis (a-part
/// first), structure constants, and the mean curvature vector.
struct MetricSolvAlgebra {
  int dim_a = 0;
  int dim = 0;
  std::vector<Eigen::MatrixXd> ad;  // ad[i](k,j) = <[e_i, e_j], e_k>
  Eigen::VectorXd mean_curvature;   // coordinates; zero outside the a-part
  std::optional<Model> parent;
  std::vector<AlgebraElement> basis;  // present for Iwasawa-derived algebras

  int dim_n() const { return dim - dim_a; }

  Eigen::VectorXd bracket_coords(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < dim; ++i) r += x[i] * (ad[i] * y);
    return r;
  }
};

struct IwasawaParts {
  std::vector<AlgebraElement> k, a, n;
};

/// g = k + a + n with n spanned by X_beta + theta_beta X_beta over the
/// positive roots. Refuses the compact model.
inline IwasawaParts iwasawa(const RootDatum& datum) {
  const AlgebraModel& mo = datum.algebra();
  if (mo.eps > 0)
    throw std::invalid_argument("iwasawa: construction requires a noncompact model");

  IwasawaParts parts;
  parts.a = datum.cartan;
  for (int i = 0; i < mo.dim_k(); ++i) parts.k.push_back(mo.k_basis_element(i));
  for (const auto& root : datum.positive)
    for (const auto& x : root.p_space) {
      AlgebraElement th = theta_map(datum, root, x);
      parts.n.push_back(AlgebraElement(datum.model_id, x.m + th.m));
    }

  // Vector-space direct sum audit.
  const int dg = mo.dim_g();
  Eigen::MatrixXd all(dg, dg);
  int c = 0;
  for (const auto& e : parts.k) all.col(c++) = mo.coords_g(e.m);
  for (const auto& e : parts.a) all.col(c++) = mo.coords_g(e.m);
  for (const auto& e : parts.n) all.col(c++) = mo.coords_g(e.m);
  if (c != dg || numeric_rank(all, 1e-9) != dg)
    throw std::runtime_error("iwasawa: k + a + n is not a direct sum");
  return parts;
}

namespace detail {

// Structure constants of a subalgebra of g spanned by `basis`, expressed in
// the coordinates of that basis (assumed independent). Throws if the span
// fails to close.
inline std::vector<Eigen::MatrixXd> structure_constants(const AlgebraModel& mo,
                                                        const std::vector<AlgebraElement>& basis,
                                                        double closure_tol = 1e-10) {
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd span(mo.dim_g(), d);
  for (int i = 0; i < d; ++i) span.col(i) = mo.coords_g(basis[i].m);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);

  std::vector<Eigen::MatrixXd> ad(d, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXcd br = basis[i].m * basis[j].m - basis[j].m * basis[i].m;
      Eigen::VectorXd target = mo.coords_g(br);
      Eigen::VectorXd coef = qr.solve(target);
      if ((span * coef - target).norm() > closure_tol * std::max(1.0, target.norm()))
        throw std::runtime_error("subalgebra span does not close under bracket");
      for (int k = 0; k < d; ++k) ad[i](k, j) = coef[k];
    }
  return ad;
}

}  // namespace detail

/// The Einstein metric solvable algebra s = a + n of an Iwasawa
/// decomposition, with the inner product pulled back from p.
inline MetricSolvAlgebra build_solvable(const RootDatum& datum) {
  const AlgebraModel& mo = datum.algebra();
  IwasawaParts parts = iwasawa(datum);

  MetricSolvAlgebra s;
  s.parent = datum.model_id;
  s.dim_a = static_cast<int>(parts.a.size());
  s.basis = parts.a;
  s.basis.insert(s.basis.end(), parts.n.begin(), parts.n.end());
  s.dim = static_cast<int>(s.basis.size());

  // Orthonormality in the pullback metric <x,y> = <proj_p x, proj_p y>.
  for (int i = 0; i < s.dim; ++i)
    for (int j = 0; j <= i; ++j) {
      Eigen::MatrixXcd ki, pi, kj, pj;
      mo.split(s.basis[i].m, ki, pi);
      mo.split(s.basis[j].m, kj, pj);
      double g = mo.inner_p(pi, pj);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-9)
        throw std::runtime_error("solvable basis is not orthonormal in the pullback metric");
    }

  s.ad = detail::structure_constants(mo, s.basis);

  s.mean_curvature = Eigen::VectorXd::Zero(s.dim);
  for (int i = 0; i < s.dim_a; ++i) s.mean_curvature[i] = s.ad[i].trace();
  return s;
}

/// A_H, the unique vector of a with <A_H, A> = Tr ad_A for A in a.
inline Eigen::VectorXd mean_curvature_vector(const MetricSolvAlgebra& s) {
  return s.mean_curvature;
}

/// Generic constructor from raw structure data (orthonormal basis assumed):
/// used for hand-built algebras in tests and controls.
inline MetricSolvAlgebra make_algebra(int dim_a, std::vector<Eigen::MatrixXd> ad) {
  MetricSolvAlgebra s;
  s.dim_a = dim_a;
  s.dim = static_cast<int>(ad.size());
  s.ad = std::move(ad);
  s.mean_curvature = Eigen::VectorXd::Zero(s.dim);
  for (int i = 0; i < dim_a; ++i) s.mean_curvature[i] = s.ad[i].trace();
  return s;
}

/// Restriction of s to the hyperplane orthogonal to a unit xi in a with
/// xi perpendicular to A_H.
inline MetricSolvAlgebra codim1_subalgebra(const MetricSolvAlgebra& s,
                                           const Eigen::VectorXd& xi_a,
                                           double tol = 1e-10) {
  if (xi_a.size() != s.dim_a)
    throw std::invalid_argument("codim1: xi must be given in a-coordinates");
  if (s.dim_a < 2)
    throw std::invalid_argument("codim1: needs rank at least 2");
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(s.dim);
  xi.head(s.dim_a) = xi_a.normalized();
  if (std::abs(xi.dot(s.mean_curvature)) > tol * std::max(1.0, s.mean_curvature.norm()))
    throw std::invalid_argument("codim1: xi is not orthogonal to the mean curvature vector");

  // New a-part: orthonormal completion of xi^perp inside a.
  Eigen::MatrixXd xi_col = xi_a.normalized();
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(xi_col);
  Eigen::MatrixXd q = qr.matrixQ();
  Eigen::MatrixXd sub(s.dim, s.dim - 1);
  for (int c = 1; c < s.dim_a; ++c) {
    sub.col(c - 1).setZero();
    sub.col(c - 1).head(s.dim_a) = q.col(c);
  }
  for (int c = 0; c < s.dim_n(); ++c) {
    sub.col(s.dim_a - 1 + c).setZero();
    sub.col(s.dim_a - 1 + c)[s.dim_a + c] = 1.0;
  }

  MetricSolvAlgebra r;
  r.parent = s.parent;
  r.dim_a = s.dim_a - 1;
  r.dim = s.dim - 1;
  r.ad.assign(r.dim, Eigen::MatrixXd::Zero(r.dim, r.dim));
  for (int i = 0; i < r.dim; ++i)
    for (int j = 0; j < r.dim; ++j) {
      Eigen::VectorXd br = s.bracket_coords(sub.col(i), sub.col(j));
      if (std::abs(br.dot(xi)) > 1e-12 * std::max(1.0, br.norm()))
        throw std::runtime_error("codim1: hyperplane is not closed under bracket");
      for (int k = 0; k < r.dim; ++k) r.ad[i](k, j) = br.dot(sub.col(k));
    }
  if (!s.basis.empty()) {
    for (int c = 0; c < r.dim; ++c) {
      Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s.basis[0].m.rows(), s.basis[0].m.cols());
      for (int i = 0; i < s.dim; ++i) acc += sub.col(c)[i] * s.basis[i].m;
      r.basis.push_back(AlgebraElement(s.basis[0].model_id, acc));
    }
  }
  r.mean_curvature = Eigen::VectorXd::Zero(r.dim);
  for (int i = 0; i < r.dim_a; ++i) r.mean_curvature[i] = r.ad[i].trace();
  return r;
}

/// Levi-Civita connection coefficients of the left-invariant metric,
/// from the Koszul formula on the orthonormal basis.
inline std::vector<Eigen::MatrixXd> koszul_connection(const MetricSolvAlgebra& s) {
  const int d = s.dim;
  // c(i,j,k) = <[e_i,e_j], e_k>
  auto c = [&](int i, int j, int k) { return s.ad[i](k, j); };
  std::vector<Eigen::MatrixXd> gamma(d, Eigen::MatrixXd::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        gamma[i](k, j) = 0.5 * (c(i, j, k) - c(j, k, i) + c(k, i, j));
  return gamma;  // gamma[i](k,j) = <nabla_{e_i} e_j, e_k>
}

/// Ricci tensor of the left-invariant metric in the orthonormal basis,
/// assembled from first principles (Koszul, then curvature, then trace).
inline Eigen::MatrixXd left_invariant_ricci(const MetricSolvAlgebra& s) {
  const int d = s.dim;
  auto gamma = koszul_connection(s);
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double sum = 0.0;
      for (int i = 0; i < d; ++i) {
        // <R(e_i, e_j) e_k, e_i>
        double term = 0.0;
        for (int mId = 0; mId < d; ++mId) {
          term += gamma[j](mId, k) * gamma[i](i, mId);
          term -= gamma[i](mId, k) * gamma[j](i, mId);
        }
        Eigen::VectorXd br = s.ad[i].col(j);  // [e_i, e_j]
        for (int mId = 0; mId < d; ++mId) term -= br[mId] * gamma[mId](i, k);
        sum += term;
      }
      ric(j, k) = sum;
    }
  return 0.5 * (ric + ric.transpose());
}

struct EinsteinCheck {
  bool einstein = false;
  double constant = 0.0;
  double residual = 0.0;
};

inline EinsteinCheck is_einstein(const MetricSolvAlgebra& s, double tol = 1e-9) {
  Eigen::MatrixXd ric = left_invariant_ricci(s);
  double c = ric.trace() / s.dim;
  double res = (ric - c * Eigen::MatrixXd::Identity(s.dim, s.dim)).norm();
  return {res <= tol, c, res};
}

/// Largest deviation of ad_A from symmetry over the a-part.
inline double iwasawa_type_residual(const MetricSolvAlgebra& s) {
  double worst = 0.0;
  for (int i = 0; i < s.dim_a; ++i)
    worst = std::max(worst, (s.ad[i] - s.ad[i].transpose()).norm());
  return worst;
}

/// Spectrum of ad_{A_H} restricted to n.
inline Eigen::VectorXd mean_curvature_spectrum(const MetricSolvAlgebra& s) {
  Eigen::MatrixXd ad_h = Eigen::MatrixXd::Zero(s.dim, s.dim);
  for (int i = 0; i < s.dim_a; ++i) ad_h += s.mean_curvature[i] * s.ad[i];
  Eigen::MatrixXd block = ad_h.bottomRightCorner(s.dim_n(), s.dim_n());
  return sym_eigenvalues(block);
}

/// Dimensions of the lower central series of n (until it stabilizes).
inline std::vector<int> lower_central_series_dims(const MetricSolvAlgebra& s) {
  const int d = s.dim, dn = s.dim_n();
  Eigen::MatrixXd cur(d, dn);
  cur.setZero();
  for (int c = 0; c < dn; ++c) cur(s.dim_a + c, c) = 1.0;
  std::vector<int> dims;
  dims.push_back(dn);
  while (true) {
    std::vector<Eigen::VectorXd> next;
    for (int i = 0; i < dn; ++i)
      for (int c = 0; c < cur.cols(); ++c) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(d);
        ei[s.dim_a + i] = 1.0;
        next.push_back(s.bracket_coords(ei, cur.col(c)));
      }
    Eigen::MatrixXd stack(d, static_cast<int>(next.size()));
    for (size_t c = 0; c < next.size(); ++c) stack.col(static_cast<int>(c)) = next[c];
    int rank = next.empty() ? 0 : numeric_rank(stack, 1e-10);
    dims.push_back(rank);
    if (rank == 0 || rank == dims[dims.size() - 2]) break;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU);
    cur = svd.matrixU().leftCols(rank);
  }
  return dims;
}

/// Span distance between [s,s] and n (both as subspaces of s).
inline double nilradical_span_residual(const MetricSolvAlgebra& s) {
  const int d = s.dim;
  std::vector<Eigen::VectorXd> der;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(d), ej = Eigen::VectorXd::Zero(d);
      ei[i] = 1.0;
      ej[j] = 1.0;
      der.push_back(s.bracket_coords(ei, ej));
    }
  Eigen::MatrixXd stack(d, static_cast<int>(der.size()));
  for (size_t c = 0; c < der.size(); ++c) stack.col(static_cast<int>(c)) = der[c];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10) ++rank;
  if (rank != s.dim_n()) return 1.0;  // dimension mismatch: maximal residual
  Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
  double worst = 0.0;
  for (int c = 0; c < s.dim_n(); ++c) {
    Eigen::VectorXd en = Eigen::VectorXd::Zero(d);
    en[s.dim_a + c] = 1.0;
    worst = std::max(worst, (en - u * (u.transpose() * en)).norm());
  }
  return worst;
}

}  // namespace einlab

#endif
