#ifndef EINLAB_LINALG_HPP
#define EINLAB_LINALG_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

namespace einlab {

/// Eigenvalues of a symmetric matrix, ascending.
inline Eigen::VectorXd sym_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues();
}

struct SymEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns
};

inline SymEigen sym_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Groups ascending eigenvalues into clusters with gap tolerance `tol`.
/// Returns index ranges [begin, end) per cluster.
inline std::vector<std::pair<int, int>> cluster_eigenvalues(
    const Eigen::VectorXd& sorted_vals, double tol) {
  std::vector<std::pair<int, int>> out;
  int n = static_cast<int>(sorted_vals.size());
  int begin = 0;
  for (int i = 1; i <= n; ++i) {
    if (i == n || sorted_vals[i] - sorted_vals[i - 1] > tol) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

/// Orthonormal basis of the null space of `m` (columns), singular values
/// below `threshold` counted as zero.
inline Eigen::MatrixXd nullspace(const Eigen::MatrixXd& m, double threshold) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > threshold) ++rank;
  return svd.matrixV().rightCols(svd.matrixV().cols() - rank);
}

inline int numeric_rank(const Eigen::MatrixXd& m, double threshold) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > threshold) ++rank;
  return rank;
}

inline double min_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

/// Gram-Schmidt with a caller-supplied inner product. Throws on a
/// numerically dependent family.
template <class Vec, class Inner>
std::vector<Vec> gram_schmidt(const std::vector<Vec>& in, const Inner& inner,
                              double dep_tol = 1e-10) {
  std::vector<Vec> out;
  for (const Vec& v0 : in) {
    Vec v = v0;
    for (const Vec& u : out) {
      double c = inner(v, u);
      v = v - c * u;
    }
    double n2 = inner(v, v);
    if (n2 < dep_tol * dep_tol)
      throw std::invalid_argument("gram_schmidt: dependent family");
    v = (1.0 / std::sqrt(n2)) * v;
    out.push_back(v);
  }
  return out;
}

/// Deterministic Halton point in [0,1)^Dim for index i (1-based internally).
inline double halton_coord(long long index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

inline std::vector<double> halton_point(long long index, int dim) {
  static const int primes[] = {2, 3, 5, 7, 11, 13};
  std::vector<double> p(dim);
  for (int d = 0; d < dim; ++d) p[d] = halton_coord(index, primes[d]);
  return p;
}

/// Seeded normal sampler for property-style tests and controls.
class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uni_(gen_);
  }
  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::mt19937 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
};

}  // namespace einlab

#endif
