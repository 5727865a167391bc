#ifndef EINLAB_ROOT_SYSTEM_HPP
#define EINLAB_ROOT_SYSTEM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "einlab/lie_core.hpp"

namespace einlab {

/// Orthonormal basis of the centralizer {Y in p : [X,Y]=0} of X in p.
inline std::vector<AlgebraElement> centralizer_in_p(const AlgebraElement& x,
                                                    double sv_threshold = 1e-9) {
  const AlgebraModel& mo = model(x.model_id);
  require_in_p(x);
  // ad_X maps p into k; its kernel in p is the centralizer.
  Eigen::MatrixXd adx(mo.dim_k(), mo.dim_p());
  for (int a = 0; a < mo.dim_p(); ++a) {
    Eigen::MatrixXcd br = x.m * mo.p_basis()[a] - mo.p_basis()[a] * x.m;
    adx.col(a) = mo.coords_k(br);
  }
  double scale = std::max(1.0, adx.norm());
  Eigen::MatrixXd ker = nullspace(adx, sv_threshold * scale);
  std::vector<AlgebraElement> out;
  for (int c = 0; c < ker.cols(); ++c)
    out.push_back(AlgebraElement(x.model_id, mo.from_p_coords(ker.col(c))));
  return out;
}

inline bool is_regular(const AlgebraElement& x) {
  const AlgebraModel& mo = model(x.model_id);
  if (mo.coords_p(x.m).norm() < 1e-12) return false;
  return static_cast<int>(centralizer_in_p(x).size()) == mo.rank();
}

struct RestrictedRoot {
  Eigen::VectorXd coords;       // <beta, A_i> against the Cartan basis
  int multiplicity = 0;
  std::vector<AlgebraElement> p_space;  // orthonormal basis of p_beta
  std::vector<AlgebraElement> k_space;  // orthonormal basis of k_beta
};

/// Cartan subalgebra of p plus its positive restricted roots.
struct RootDatum {
  Model model_id;
  std::vector<AlgebraElement> cartan;  // orthonormal
  std::vector<RestrictedRoot> positive;
  Eigen::VectorXd regular_covector;    // coordinates in the Cartan basis

  const AlgebraModel& algebra() const { return model(model_id); }

  AlgebraElement cartan_vector(const Eigen::VectorXd& coords) const {
    const AlgebraModel& mo = algebra();
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(mo.n, mo.n);
    for (size_t i = 0; i < cartan.size(); ++i) x += coords[i] * cartan[i].m;
    return AlgebraElement(model_id, x);
  }

  AlgebraElement root_vector(const RestrictedRoot& r) const {
    return cartan_vector(r.coords);
  }

  int root_space_total() const {
    int s = 0;
    for (const auto& r : positive) s += r.multiplicity;
    return s;
  }
};

namespace detail {

// Squared adjoint action of A restricted to p or k, in basis coordinates.
inline Eigen::MatrixXd ad_squared(const AlgebraModel& mo, const Eigen::MatrixXcd& a,
                                  bool on_p) {
  const auto& basis = on_p ? mo.p_basis() : mo.k_basis();
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd m(d, d);
  for (int c = 0; c < d; ++c) {
    Eigen::MatrixXcd once = a * basis[c] - basis[c] * a;
    Eigen::MatrixXcd twice = a * once - once * a;
    m.col(c) = on_p ? mo.coords_p(twice) : mo.coords_k(twice);
  }
  return 0.5 * (m + m.transpose());
}

// Rayleigh value of (ad_A)^2 on a joint eigenspace; throws if it is not
// scalar on that subspace.
inline double scalar_eigenvalue(const Eigen::MatrixXd& op, const Eigen::MatrixXd& basis,
                                double tol) {
  Eigen::MatrixXd restricted = basis.transpose() * op * basis;
  double mu = restricted.trace() / restricted.rows();
  Eigen::MatrixXd dev =
      restricted - mu * Eigen::MatrixXd::Identity(restricted.rows(), restricted.cols());
  if (dev.norm() > tol * std::max(1.0, std::abs(mu)))
    throw std::runtime_error("root refinement: non-scalar block");
  return mu;
}

}  // namespace detail

/// Simultaneous eigendecomposition of {(ad_A)^2 : A in a} on p and k:
/// produces the positive restricted roots with multiplicities and root-space
/// bases. The positivity half-space comes from a fixed generic covector.
inline RootDatum restricted_roots(Model m, const std::vector<AlgebraElement>& cartan_in,
                                  double cluster_tol = 1e-7) {
  const AlgebraModel& mo = model(m);
  const int rank = mo.rank();
  if (static_cast<int>(cartan_in.size()) != rank)
    throw std::invalid_argument("cartan basis has the wrong dimension");
  for (const auto& a : cartan_in) require_in_p(a);
  for (size_t i = 0; i < cartan_in.size(); ++i)
    for (size_t j = i + 1; j < cartan_in.size(); ++j)
      if (bracket(cartan_in[i], cartan_in[j]).m.norm() > 1e-12)
        throw std::invalid_argument("cartan basis is not abelian");

  // Orthonormalize the Cartan basis in the invariant metric.
  std::vector<Eigen::VectorXd> ac;
  for (const auto& a : cartan_in) ac.push_back(mo.coords_p(a.m));
  auto apply = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(v); };
  ac = gram_schmidt(ac, apply);
  std::vector<AlgebraElement> cartan;
  for (const auto& c : ac) cartan.push_back(AlgebraElement(m, mo.from_p_coords(c)));

  RootDatum datum;
  datum.model_id = m;
  datum.cartan = cartan;

  // Fixed generic combination; also serves as the recorded regular covector.
  Eigen::VectorXd gen(rank);
  const double coeffs[4] = {1.0, 0.6180339887498949, 0.3819660112501051, 0.2360679774997897};
  for (int i = 0; i < rank; ++i) gen[i] = coeffs[i];
  datum.regular_covector = gen;

  AlgebraElement a_star = datum.cartan_vector(gen);
  if (!is_regular(a_star))
    throw std::runtime_error("generic Cartan combination is not regular");

  Eigen::MatrixXd op_p = detail::ad_squared(mo, a_star.m, true);
  Eigen::MatrixXd op_k = detail::ad_squared(mo, a_star.m, false);
  SymEigen ep = sym_eigen(op_p);
  SymEigen ek = sym_eigen(op_k);

  auto clusters_p = cluster_eigenvalues(ep.values, cluster_tol);
  auto clusters_k = cluster_eigenvalues(ek.values, cluster_tol);

  // Per nonzero cluster of (ad_{A*})^2 on p: recover |<beta,A_i>| from the
  // basis operators, then the relative signs from pair sums, then orient by
  // the covector.
  for (auto [b, e] : clusters_p) {
    double mu = ep.values.segment(b, e - b).mean();
    if (std::abs(mu) <= cluster_tol) continue;  // kernel: a itself (+ k_0 on k side)
    Eigen::MatrixXd sub = ep.vectors.middleCols(b, e - b);

    Eigen::VectorXd beta(rank);
    std::vector<Eigen::MatrixXd> op_i(rank);
    for (int i = 0; i < rank; ++i)
      op_i[i] = detail::ad_squared(mo, cartan[i].m, true);
    for (int i = 0; i < rank; ++i) {
      double mui = detail::scalar_eigenvalue(op_i[i], sub, 1e-8);
      double sq = -mo.eps * mui;  // <beta, A_i>^2
      beta[i] = std::sqrt(std::max(0.0, sq));
    }
    // Relative signs from (ad_{A_ref+A_i})^2 = -eps <beta, A_ref+A_i>^2.
    int ref = 0;
    for (int i = 1; i < rank; ++i)
      if (beta[i] > beta[ref]) ref = i;
    for (int i = 0; i < rank; ++i) {
      if (i == ref || beta[i] < 1e-10) continue;
      Eigen::MatrixXcd sum_a = cartan[ref].m + cartan[i].m;
      double mus = detail::scalar_eigenvalue(detail::ad_squared(mo, sum_a, true), sub, 1e-8);
      double target = -mo.eps * mus;  // (beta_ref + beta_i)^2
      double same = beta[ref] + beta[i], flip = beta[ref] - beta[i];
      if (std::abs(same * same - target) > std::abs(flip * flip - target)) beta[i] = -beta[i];
    }
    if (beta.dot(gen) < 0) beta = -beta;

    RestrictedRoot root;
    root.coords = beta;
    root.multiplicity = e - b;
    for (int c = 0; c < sub.cols(); ++c)
      root.p_space.push_back(AlgebraElement(m, mo.from_p_coords(sub.col(c))));

    // Matching k_beta block: same (ad_{A*})^2 eigenvalue.
    for (auto [kb, ke] : clusters_k) {
      double muk = ek.values.segment(kb, ke - kb).mean();
      if (std::abs(muk - mu) < 100 * cluster_tol * std::max(1.0, std::abs(mu))) {
        Eigen::MatrixXd ksub = ek.vectors.middleCols(kb, ke - kb);
        for (int c = 0; c < ksub.cols(); ++c)
          root.k_space.push_back(AlgebraElement(m, mo.from_k_coords(ksub.col(c))));
      }
    }
    if (static_cast<int>(root.k_space.size()) != root.multiplicity)
      throw std::runtime_error("restricted roots: p/k multiplicity mismatch");
    datum.positive.push_back(std::move(root));
  }

  std::sort(datum.positive.begin(), datum.positive.end(),
            [&](const RestrictedRoot& x, const RestrictedRoot& y) {
              return x.coords.dot(gen) < y.coords.dot(gen);
            });

  if (datum.root_space_total() + rank != mo.dim_p())
    throw std::runtime_error("restricted roots: dimension audit failed");
  return datum;
}

inline RootDatum standard_root_datum(Model m) {
  return restricted_roots(m, model(m).standard_cartan());
}

/// The map theta_beta: p_beta -> k_beta defined by [A, X] = <beta,A> theta(X).
/// Validates both defining identities over the Cartan basis.
inline AlgebraElement theta_map(const RootDatum& datum, const RestrictedRoot& root,
                                const AlgebraElement& x_beta, double tol = 1e-11) {
  const AlgebraModel& mo = datum.algebra();
  double b2 = root.coords.squaredNorm();
  if (b2 < 1e-14) throw std::invalid_argument("theta_map: degenerate root");
  AlgebraElement beta_vec = datum.root_vector(root);
  AlgebraElement u = bracket(beta_vec, x_beta);
  Eigen::MatrixXcd um = u.m / b2;

  double worst = 0.0;
  for (size_t i = 0; i < datum.cartan.size(); ++i) {
    const Eigen::MatrixXcd& a = datum.cartan[i].m;
    double ba = root.coords[static_cast<int>(i)];
    Eigen::MatrixXcd r1 = (a * x_beta.m - x_beta.m * a) - ba * um;
    Eigen::MatrixXcd r2 = (a * um - um * a) + mo.eps * ba * x_beta.m;
    worst = std::max({worst, r1.norm(), r2.norm()});
  }
  double nrm = std::max(1.0, x_beta.m.norm());
  if (worst > tol * nrm)
    throw std::runtime_error("theta_map: defining identities violated");
  return AlgebraElement(datum.model_id, um);
}

}  // namespace einlab

#endif
