#ifndef EINLAB_LIE_CORE_HPP
#define EINLAB_LIE_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "einlab/linalg.hpp"

namespace einlab {

enum class Model { Sl3R, Sl4R, Su3 };

inline std::string model_name(Model m) {
  switch (m) {
    case Model::Sl3R: return "sl3";
    case Model::Sl4R: return "sl4";
    case Model::Su3: return "su3";
  }
  return "?";
}

class AlgebraModel;
const AlgebraModel& model(Model m);

/// Member of one of the three built-in matrix Lie algebras.
struct AlgebraElement {
  Model model_id;
  Eigen::MatrixXcd m;

  AlgebraElement(Model id, Eigen::MatrixXcd mat) : model_id(id), m(std::move(mat)) {}
};

/// One of the matrix algebra models sl(3,R), sl(4,R), su(3), together with
/// its Cartan split, Killing Gram matrix and the calibrated invariant metric.
///
/// Basis order (fixed; reports depend on it):
///   p-part: diagonal directions d_r = diag(1,..,1,-r,0,..)/|.| for r=1..n-1,
///           then symmetric off-diagonal pairs (i,j), i<j, in lexicographic
///           order; each multiplied by i for su(3).
///   k-part: antisymmetric pairs (i,j), i<j, lexicographic.
class AlgebraModel {
 public:
  Model id;
  int n = 0;              // ambient matrix size
  double eps = 0.0;       // sign of the Einstein constant of the model space
  double scale = 0.0;     // metric factor applied to -eps*B

  explicit AlgebraModel(Model which) : id(which) {
    switch (id) {
      case Model::Sl3R: n = 3; eps = -1.0; break;
      case Model::Sl4R: n = 4; eps = -1.0; break;
      case Model::Su3:  n = 3; eps = +1.0; break;
    }
    build_raw_bases();
    build_killing();
    calibrate_scale();
    normalize_bases();
    build_gram_caches();
  }

  int dim_g() const { return static_cast<int>(p_raw_.size() + k_raw_.size()); }
  int dim_p() const { return static_cast<int>(p_raw_.size()); }
  int dim_k() const { return static_cast<int>(k_raw_.size()); }
  int rank() const { return n - 1 == 3 ? 3 : 2; }
  bool is_complex() const { return id == Model::Su3; }

  AlgebraElement element(const Eigen::MatrixXcd& mat, double tol = 1e-10) const {
    validate(mat, tol);
    return AlgebraElement(id, mat);
  }

  AlgebraElement p_basis_element(int a) const { return AlgebraElement(id, p_raw_[a]); }
  AlgebraElement k_basis_element(int a) const { return AlgebraElement(id, k_raw_[a]); }

  const std::vector<Eigen::MatrixXcd>& p_basis() const { return p_raw_; }
  const std::vector<Eigen::MatrixXcd>& k_basis() const { return k_raw_; }

  /// First rank() p-basis elements span the standard (diagonal) Cartan
  /// subalgebra of p.
  std::vector<AlgebraElement> standard_cartan() const {
    std::vector<AlgebraElement> a;
    for (int r = 0; r < rank(); ++r) a.push_back(p_basis_element(r));
    return a;
  }

  // ---- involution and split -------------------------------------------

  Eigen::MatrixXcd theta(const Eigen::MatrixXcd& x) const { return -x.transpose(); }

  void split(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& k_part,
             Eigen::MatrixXcd& p_part) const {
    Eigen::MatrixXcd t = theta(x);
    k_part = 0.5 * (x + t);
    p_part = 0.5 * (x - t);
  }

  double p_residual(const Eigen::MatrixXcd& x) const {
    Eigen::MatrixXcd k_part, p_part;
    split(x, k_part, p_part);
    return k_part.norm();
  }

  // ---- Killing form and metric ----------------------------------------

  double killing(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const {
    Eigen::VectorXd cx = coords_g(x), cy = coords_g(y);
    return cx.dot(killing_gram_ * cy);
  }

  /// Invariant inner product s*(-eps)*B on p.
  double inner_p(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const {
    return scale * (-eps) * killing(x, y);
  }

  /// Positive-definite companion form on k, used to normalize k-bases.
  double inner_k(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const {
    return scale * (-killing(x, y));
  }

  /// Positive form on all of g (p and k parts are orthogonal).
  double inner_g(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) const {
    Eigen::MatrixXcd xk, xp, yk, yp;
    split(x, xk, xp);
    split(y, yk, yp);
    return inner_p(xp, yp) + inner_k(xk, yk);
  }

  // ---- coordinates -----------------------------------------------------

  Eigen::VectorXd coords_p(const Eigen::MatrixXcd& x) const {
    Eigen::VectorXd c(dim_p());
    for (int a = 0; a < dim_p(); ++a) c[a] = frob_coeff(x, p_raw_[a]);
    return c;
  }
  Eigen::VectorXd coords_k(const Eigen::MatrixXcd& x) const {
    Eigen::VectorXd c(dim_k());
    for (int a = 0; a < dim_k(); ++a) c[a] = frob_coeff(x, k_raw_[a]);
    return c;
  }
  Eigen::VectorXd coords_g(const Eigen::MatrixXcd& x) const {
    Eigen::VectorXd c(dim_g());
    c.head(dim_p()) = coords_p(x);
    c.tail(dim_k()) = coords_k(x);
    return c;
  }
  Eigen::MatrixXcd from_p_coords(const Eigen::VectorXd& c) const {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < dim_p(); ++a) x += c[a] * p_raw_[a];
    return x;
  }
  Eigen::MatrixXcd from_k_coords(const Eigen::VectorXd& c) const {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < dim_k(); ++a) x += c[a] * k_raw_[a];
    return x;
  }

  void validate(const Eigen::MatrixXcd& x, double tol) const {
    if (x.rows() != n || x.cols() != n)
      throw std::invalid_argument("element: wrong matrix size for model");
    if (std::abs(x.trace()) > tol)
      throw std::invalid_argument("element: nonzero trace");
    if (id == Model::Su3) {
      if ((x + x.adjoint()).norm() > tol)
        throw std::invalid_argument("element: not anti-Hermitian");
    } else {
      if (x.imag().norm() > tol)
        throw std::invalid_argument("element: complex entries in a real model");
    }
  }

  const Eigen::MatrixXd& killing_gram() const { return killing_gram_; }
  const Eigen::MatrixXd& p_inner_gram() const { return p_gram_; }

 private:
  std::vector<Eigen::MatrixXcd> p_raw_, k_raw_;
  Eigen::MatrixXd killing_gram_;
  Eigen::MatrixXd p_gram_;

  static double frob_re(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a.cwiseProduct(b.conjugate())).sum().real();
  }
  double frob_coeff(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& b) const {
    return frob_re(x, b) / frob_re(b, b);
  }

  void build_raw_bases() {
    const std::complex<double> I(0.0, 1.0);
    const std::complex<double> unit = (id == Model::Su3) ? I : std::complex<double>(1.0, 0.0);
    for (int r = 1; r < n; ++r) {
      Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
      for (int i = 0; i < r; ++i) d(i, i) = unit;
      d(r, r) = -static_cast<double>(r) * unit;
      p_raw_.push_back(d / std::sqrt(static_cast<double>(r + r * r)));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
        s(i, j) = unit;
        s(j, i) = unit;
        p_raw_.push_back(s / std::sqrt(2.0));
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
        a(i, j) = 1.0;
        a(j, i) = -1.0;
        k_raw_.push_back(a / std::sqrt(2.0));
      }
  }

  // B(x,y) = Tr(ad_x ad_y), assembled once over the fixed basis.
  void build_killing() {
    const int dg = dim_g();
    std::vector<Eigen::MatrixXcd> basis = p_raw_;
    basis.insert(basis.end(), k_raw_.begin(), k_raw_.end());
    std::vector<Eigen::MatrixXd> ad(dg);
    for (int a = 0; a < dg; ++a) {
      Eigen::MatrixXd ada(dg, dg);
      for (int b = 0; b < dg; ++b) {
        Eigen::MatrixXcd br = basis[a] * basis[b] - basis[b] * basis[a];
        ada.col(b) = coords_g(br);
      }
      ad[a] = ada;
    }
    killing_gram_.resize(dg, dg);
    for (int a = 0; a < dg; ++a)
      for (int b = 0; b <= a; ++b) {
        double v = (ad[a] * ad[b]).trace();
        killing_gram_(a, b) = v;
        killing_gram_(b, a) = v;
      }
  }

  // The flat-ambient embeddings of the model spaces induce, at the base
  // point, the metric 4*Re Tr(X Y^*) on p. The factor `scale` matches
  // -eps*B to it, so quoted curvature constants hold verbatim.
  void calibrate_scale() {
    double s_min = 0, s_max = 0;
    for (int a = 0; a < dim_p(); ++a) {
      double embedded = 4.0 * frob_re(p_raw_[a], p_raw_[a]);
      double kb = -eps * killing(p_raw_[a], p_raw_[a]);
      double s = embedded / kb;
      if (a == 0) { s_min = s_max = s; }
      s_min = std::min(s_min, s);
      s_max = std::max(s_max, s);
    }
    if (s_max - s_min > 1e-12)
      throw std::runtime_error("metric calibration: inconsistent scale");
    scale = 0.5 * (s_min + s_max);
  }

  void normalize_bases() {
    for (auto& b : p_raw_) b /= std::sqrt(inner_p(b, b));
    for (auto& b : k_raw_) b /= std::sqrt(inner_k(b, b));
    build_killing();
  }

  void build_gram_caches() {
    p_gram_.resize(dim_p(), dim_p());
    for (int a = 0; a < dim_p(); ++a)
      for (int b = 0; b < dim_p(); ++b)
        p_gram_(a, b) = inner_p(p_raw_[a], p_raw_[b]);
    if ((p_gram_ - Eigen::MatrixXd::Identity(dim_p(), dim_p())).norm() > 1e-10)
      throw std::runtime_error("p basis failed to orthonormalize");
  }
};

inline const AlgebraModel& model(Model m) {
  static const AlgebraModel sl3(Model::Sl3R);
  static const AlgebraModel sl4(Model::Sl4R);
  static const AlgebraModel su3(Model::Su3);
  switch (m) {
    case Model::Sl3R: return sl3;
    case Model::Sl4R: return sl4;
    case Model::Su3: return su3;
  }
  throw std::logic_error("unknown model");
}

// ---- element-level operations ------------------------------------------

inline void require_same_model(const AlgebraElement& x, const AlgebraElement& y) {
  if (x.model_id != y.model_id)
    throw std::invalid_argument("operands belong to different models");
}

inline AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_model(x, y);
  return AlgebraElement(x.model_id, x.m * y.m - y.m * x.m);
}

inline double killing_form(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_model(x, y);
  return model(x.model_id).killing(x.m, y.m);
}

inline void require_in_p(const AlgebraElement& x, double tol = 1e-8) {
  if (model(x.model_id).p_residual(x.m) > tol)
    throw std::invalid_argument("element is not in p");
}

inline double inner(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_model(x, y);
  require_in_p(x);
  require_in_p(y);
  return model(x.model_id).inner_p(x.m, y.m);
}

inline std::pair<AlgebraElement, AlgebraElement> cartan_split(const AlgebraElement& x) {
  Eigen::MatrixXcd k_part, p_part;
  model(x.model_id).split(x.m, k_part, p_part);
  return {AlgebraElement(x.model_id, k_part), AlgebraElement(x.model_id, p_part)};
}

/// Curvature of the model space: R(X,Y)Z = -[[X,Y],Z] on p.
inline AlgebraElement curvature(const AlgebraElement& x, const AlgebraElement& y,
                                const AlgebraElement& z) {
  require_same_model(x, y);
  require_same_model(x, z);
  require_in_p(x);
  require_in_p(y);
  require_in_p(z);
  Eigen::MatrixXcd xy = x.m * y.m - y.m * x.m;
  Eigen::MatrixXcd r = -(xy * z.m - z.m * xy);
  return AlgebraElement(x.model_id, r);
}

inline double curvature_quad(const AlgebraElement& x, const AlgebraElement& y,
                             const AlgebraElement& z, const AlgebraElement& w) {
  return inner(curvature(x, y, z), w);
}

/// Matrix of Y -> R(Y,xi)xi in the fixed orthonormal p-basis.
inline Eigen::MatrixXd jacobi_operator(const AlgebraElement& xi) {
  const AlgebraModel& mo = model(xi.model_id);
  require_in_p(xi);
  const int dp = mo.dim_p();
  Eigen::MatrixXd j(dp, dp);
  for (int a = 0; a < dp; ++a) {
    AlgebraElement ra = curvature(mo.p_basis_element(a), xi, xi);
    j.col(a) = mo.coords_p(ra.m);
  }
  return 0.5 * (j + j.transpose());
}

/// True when [[span, span], span] stays inside the span within tol.
inline bool is_lie_triple_system(const std::vector<AlgebraElement>& span_basis,
                                 double tol = 1e-9) {
  if (span_basis.empty()) throw std::invalid_argument("empty basis");
  const AlgebraModel& mo = model(span_basis.front().model_id);
  for (const auto& b : span_basis) require_in_p(b);

  Eigen::MatrixXd raw(mo.dim_p(), static_cast<int>(span_basis.size()));
  for (int i = 0; i < raw.cols(); ++i) raw.col(i) = mo.coords_p(span_basis[i].m);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(raw, Eigen::ComputeThinU);
  if (svd.rank() < raw.cols())
    throw std::invalid_argument("degenerate basis for Lie triple test");
  Eigen::MatrixXd q = svd.matrixU().leftCols(raw.cols());

  double worst = 0.0;
  const int m = raw.cols();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        Eigen::MatrixXcd bi = mo.from_p_coords(q.col(i));
        Eigen::MatrixXcd bj = mo.from_p_coords(q.col(j));
        Eigen::MatrixXcd bk = mo.from_p_coords(q.col(k));
        Eigen::MatrixXcd bij = bi * bj - bj * bi;
        Eigen::MatrixXcd r = bij * bk - bk * bij;
        Eigen::VectorXd c = mo.coords_p(r);
        Eigen::VectorXd res = c - q * (q.transpose() * c);
        worst = std::max(worst, res.norm());
      }
  return worst <= tol;
}

/// Ricci tensor of the model space in the orthonormal p-basis.
inline Eigen::MatrixXd symmetric_space_ricci(Model m) {
  const AlgebraModel& mo = model(m);
  const int dp = mo.dim_p();
  Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(dp, dp);
  for (int a = 0; a < dp; ++a)
    for (int c = 0; c < dp; ++c) {
      AlgebraElement r =
          curvature(mo.p_basis_element(a), mo.p_basis_element(c), mo.p_basis_element(c));
      for (int b = a; b < dp; ++b)
        ric(a, b) += mo.inner_p(r.m, mo.p_basis()[b]);
    }
  for (int a = 0; a < dp; ++a)
    for (int b = 0; b < a; ++b) ric(a, b) = ric(b, a);
  return ric;
}

/// Einstein constant of the model space (throws if Ricci is not a multiple
/// of the metric, which would indicate a model bug).
inline double model_einstein_constant(Model m, double tol = 1e-9) {
  Eigen::MatrixXd ric = symmetric_space_ricci(m);
  const int dp = ric.rows();
  double c = ric.trace() / dp;
  if ((ric - c * Eigen::MatrixXd::Identity(dp, dp)).norm() > tol)
    throw std::runtime_error("model space is not Einstein to tolerance");
  return c;
}

inline AlgebraElement random_p_element(Model m, Rng& rng) {
  const AlgebraModel& mo = model(m);
  return AlgebraElement(m, mo.from_p_coords(rng.normal_vector(mo.dim_p())));
}

inline AlgebraElement random_k_element(Model m, Rng& rng) {
  const AlgebraModel& mo = model(m);
  return AlgebraElement(m, mo.from_k_coords(rng.normal_vector(mo.dim_k())));
}

}  // namespace einlab

#endif
