#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "einlab/root_system.hpp"

using namespace einlab;

namespace {

AlgebraElement diag_p(Model m, std::initializer_list<double> entries) {
  const auto& mo = model(m);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(mo.n, mo.n);
  const std::complex<double> u =
      (m == Model::Su3) ? std::complex<double>(0, 1) : std::complex<double>(1, 0);
  int i = 0;
  for (double e : entries) d(i, i) = e * u, ++i;
  return mo.element(d);
}

}  // namespace

TEST_CASE("centralizer dimensions: regular, singular, zero") {
  AlgebraElement reg = diag_p(Model::Sl3R, {2.0, -0.5, -1.5});
  CHECK(centralizer_in_p(reg).size() == 2);
  CHECK(is_regular(reg));

  AlgebraElement sing = diag_p(Model::Sl3R, {-2.0, 1.0, 1.0});
  CHECK(centralizer_in_p(sing).size() == 3);
  CHECK_FALSE(is_regular(sing));

  AlgebraElement zero(Model::Sl3R, Eigen::MatrixXcd::Zero(3, 3));
  CHECK(centralizer_in_p(zero).size() == 5);
  CHECK_FALSE(is_regular(zero));
}

TEST_CASE("centralizer basis is orthonormal and commutes") {
  Rng rng(41);
  for (Model m : {Model::Sl3R, Model::Su3, Model::Sl4R}) {
    AlgebraElement x = random_p_element(m, rng);
    auto cen = centralizer_in_p(x);
    for (size_t i = 0; i < cen.size(); ++i) {
      CHECK(bracket(x, cen[i]).m.norm() < 1e-9 * std::max(1.0, x.m.norm()));
      for (size_t j = 0; j < cen.size(); ++j)
        CHECK(inner(cen[i], cen[j]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("restricted roots of sl3: six roots of type A2, multiplicity one") {
  RootDatum datum = standard_root_datum(Model::Sl3R);
  CHECK(datum.positive.size() == 3);  // six roots come in +- pairs
  for (const auto& r : datum.positive) CHECK(r.multiplicity == 1);

  // A2 geometry: equal lengths, pairwise angles 60 degrees, and the sum of
  // two simple roots is the third.
  std::vector<Eigen::VectorXd> b;
  for (const auto& r : datum.positive) b.push_back(r.coords);
  double len = b[0].norm();
  for (const auto& v : b) CHECK(v.norm() == doctest::Approx(len).epsilon(1e-10));
  // sorted by covector pairing: the largest is the sum of the other two
  CHECK((b[0] + b[1] - b[2]).norm() < 1e-9 * len);

  // dimension audit 5 = 2 + 3
  CHECK(datum.root_space_total() + 2 == model(Model::Sl3R).dim_p());
}

TEST_CASE("restricted roots of su3: type A2 with the compact eigenvalue law") {
  RootDatum datum = standard_root_datum(Model::Su3);
  CHECK(datum.positive.size() == 3);
  for (const auto& r : datum.positive) CHECK(r.multiplicity == 1);
  std::vector<Eigen::VectorXd> b;
  for (const auto& r : datum.positive) b.push_back(r.coords);
  CHECK((b[0] + b[1] - b[2]).norm() < 1e-9);
  CHECK(datum.root_space_total() + 2 == model(Model::Su3).dim_p());
}

TEST_CASE("restricted roots of sl4: twelve roots in the +-e_i+-e_j pattern") {
  RootDatum datum = standard_root_datum(Model::Sl4R);
  CHECK(datum.positive.size() == 6);
  for (const auto& r : datum.positive) CHECK(r.multiplicity == 1);
  CHECK(datum.root_space_total() + 3 == model(Model::Sl4R).dim_p());  // 9 = 3 + 6

  // A3 pattern: all roots the same length; for each pair of non-proportional
  // roots the inner product is 0 or +-|b|^2/2.
  std::vector<Eigen::VectorXd> b;
  for (const auto& r : datum.positive) b.push_back(r.coords);
  double len2 = b[0].squaredNorm();
  for (const auto& v : b) CHECK(v.squaredNorm() == doctest::Approx(len2).epsilon(1e-9));
  for (size_t i = 0; i < b.size(); ++i)
    for (size_t j = i + 1; j < b.size(); ++j) {
      double c = std::abs(b[i].dot(b[j])) / len2;
      CHECK((c < 1e-9 || std::abs(c - 0.5) < 1e-9));
    }
}

TEST_CASE("root defining equation holds on the root spaces") {
  for (Model m : {Model::Sl3R, Model::Su3, Model::Sl4R}) {
    const auto& mo = model(m);
    RootDatum datum = standard_root_datum(m);
    for (const auto& root : datum.positive)
      for (const auto& x : root.p_space)
        for (size_t i = 0; i < datum.cartan.size(); ++i) {
          const auto& a = datum.cartan[i];
          Eigen::MatrixXcd twice = bracket(a, bracket(a, x)).m;
          double ba = root.coords[static_cast<int>(i)];
          Eigen::MatrixXcd expect = -mo.eps * ba * ba * x.m;
          CHECK((twice - expect).norm() < 1e-10);
        }
  }
}

TEST_CASE("theta map: defining identities, linearity, odd parity") {
  RootDatum datum = standard_root_datum(Model::Sl3R);
  const auto& root = datum.positive[0];
  const AlgebraElement& x = root.p_space[0];

  AlgebraElement th = theta_map(datum, root, x);
  CHECK(model(Model::Sl3R).p_residual(th.m) > 0.1);  // lands in k

  // on an off-diagonal root space the map sends the symmetric pair to the
  // antisymmetric one
  for (const auto& r : datum.positive) {
    Eigen::MatrixXcd xm = r.p_space[0].m;
    int i = -1, j = -1;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b)
        if (std::abs(xm(a, b)) > 0.1) i = a, j = b;
    if (i < 0) continue;
    Eigen::MatrixXcd sym = Eigen::MatrixXcd::Zero(3, 3);
    sym(i, j) = sym(j, i) = 1.0;
    if ((xm - xm(i, j) * sym).norm() > 1e-10) continue;  // not a pure pair
    AlgebraElement u = theta_map(datum, r, AlgebraElement(Model::Sl3R, sym));
    Eigen::MatrixXcd anti = Eigen::MatrixXcd::Zero(3, 3);
    anti(i, j) = 1.0;
    anti(j, i) = -1.0;
    double c = u.m(i, j).real();
    CHECK((u.m - c * anti).norm() < 1e-11);
    CHECK(std::abs(c) > 0.1);
  }

  AlgebraElement x2(Model::Sl3R, 2.0 * x.m);
  AlgebraElement th2 = theta_map(datum, root, x2);
  CHECK((th2.m - 2.0 * th.m).norm() < 1e-12);

  RestrictedRoot neg = root;
  neg.coords = -root.coords;
  AlgebraElement thm = theta_map(datum, neg, x);
  CHECK((thm.m + th.m).norm() < 1e-12);
}

TEST_CASE("theta pairing identity <[X_b, theta X_b], A> = eps <b,A> |X_b|^2") {
  for (Model m : {Model::Sl3R, Model::Su3, Model::Sl4R}) {
    const auto& mo = model(m);
    RootDatum datum = standard_root_datum(m);
    for (const auto& root : datum.positive) {
      const AlgebraElement& x = root.p_space[0];
      AlgebraElement th = theta_map(datum, root, x);
      AlgebraElement br = bracket(x, th);
      auto [bk, bp] = cartan_split(br);
      for (size_t i = 0; i < datum.cartan.size(); ++i) {
        double lhs = mo.inner_p(bp.m, datum.cartan[i].m);
        double rhs = mo.eps * root.coords[static_cast<int>(i)] * inner(x, x);
        CHECK(std::abs(lhs - rhs) < 1e-11);
      }
    }
  }
}

TEST_CASE("bracket grading: [k_b, p_c] inside p_{b+c} + p_{b-c}") {
  for (Model m : {Model::Sl3R, Model::Su3, Model::Sl4R}) {
    const auto& mo = model(m);
    RootDatum datum = standard_root_datum(m);
    const int np = static_cast<int>(datum.positive.size());
    for (int ib = 0; ib < np; ++ib)
      for (int ic = 0; ic < np; ++ic) {
        const auto& rb = datum.positive[ib];
        const auto& rc = datum.positive[ic];
        for (const auto& u : rb.k_space)
          for (const auto& x : rc.p_space) {
            Eigen::MatrixXcd br = bracket(u, x).m;
            // project out the allowed root spaces p_{b+c}, p_{b-c} (and a if
            // b == c)
            Eigen::VectorXd coords = mo.coords_p(br);
            Eigen::VectorXd allowed_sum = Eigen::VectorXd::Zero(mo.dim_p());
            auto add_space = [&](const Eigen::VectorXd& target) {
              for (const auto& other : datum.positive) {
                if ((other.coords - target).norm() < 1e-8 ||
                    (other.coords + target).norm() < 1e-8) {
                  for (const auto& bx : other.p_space) {
                    Eigen::VectorXd v = mo.coords_p(bx.m);
                    allowed_sum += v * v.dot(coords);
                  }
                }
              }
            };
            add_space(rb.coords + rc.coords);
            add_space(rb.coords - rc.coords);
            if ((rb.coords - rc.coords).norm() < 1e-8) {
              // the a-part is allowed when b == c
              for (const auto& a : datum.cartan) {
                Eigen::VectorXd v = mo.coords_p(a.m);
                allowed_sum += v * v.dot(coords);
              }
            }
            CHECK((coords - allowed_sum).norm() < 1e-11 * std::max(1.0, br.norm()));
          }
      }
  }
}

TEST_CASE("nonproportional nonorthogonal roots interact: R(A, X_b) X_c != 0") {
  for (Model m : {Model::Sl3R, Model::Su3, Model::Sl4R}) {
    RootDatum datum = standard_root_datum(m);
    Rng rng(47);
    const int np = static_cast<int>(datum.positive.size());
    for (int ib = 0; ib < np; ++ib)
      for (int ic = 0; ic < np; ++ic) {
        const auto& rb = datum.positive[ib];
        const auto& rc = datum.positive[ic];
        double cosang = rb.coords.dot(rc.coords) / (rb.coords.norm() * rc.coords.norm());
        if (std::abs(cosang) < 1e-9 || std::abs(std::abs(cosang) - 1.0) < 1e-9) continue;
        // random A with <b, A> != 0
        for (int t = 0; t < 5; ++t) {
          Eigen::VectorXd ca = rng.normal_vector(static_cast<int>(datum.cartan.size()));
          if (std::abs(ca.dot(rb.coords)) < 0.1) continue;
          AlgebraElement a = datum.cartan_vector(ca);
          AlgebraElement xb = rb.p_space[0], xc = rc.p_space[0];
          CHECK(curvature(a, xb, xc).m.norm() > 1e-8);
        }
      }
  }
}

TEST_CASE("root set is stable under a different regular element") {
  const auto& mo = model(Model::Sl3R);
  // re-derive the datum from a rotated (still diagonal-spanning) basis
  auto std_cartan = mo.standard_cartan();
  std::vector<AlgebraElement> tilted;
  tilted.push_back(AlgebraElement(Model::Sl3R,
                                  0.8 * std_cartan[0].m + 0.6 * std_cartan[1].m));
  tilted.push_back(AlgebraElement(Model::Sl3R,
                                  -0.6 * std_cartan[0].m + 0.8 * std_cartan[1].m));
  RootDatum d1 = standard_root_datum(Model::Sl3R);
  RootDatum d2 = restricted_roots(Model::Sl3R, tilted);

  // Compare the root sets as vectors in p (basis independent).
  auto as_p = [&](const RootDatum& d) {
    std::vector<Eigen::VectorXd> out;
    for (const auto& r : d.positive) {
      Eigen::VectorXd v = mo.coords_p(d.root_vector(r).m);
      out.push_back(v);
    }
    return out;
  };
  auto r1 = as_p(d1), r2 = as_p(d2);
  REQUIRE(r1.size() == r2.size());
  double hausdorff = 0.0;
  for (const auto& v : r1) {
    double best = 1e9;
    for (const auto& w : r2) best = std::min({best, (v - w).norm(), (v + w).norm()});
    hausdorff = std::max(hausdorff, best);
  }
  CHECK(hausdorff < 1e-9);
}

TEST_CASE("restricted_roots rejects bad cartan data") {
  const auto& mo = model(Model::Sl3R);
  auto cartan = mo.standard_cartan();
  cartan.pop_back();
  CHECK_THROWS_AS(restricted_roots(Model::Sl3R, cartan), std::invalid_argument);

  std::vector<AlgebraElement> not_abelian = {mo.p_basis_element(0), mo.p_basis_element(2)};
  CHECK_THROWS_AS(restricted_roots(Model::Sl3R, not_abelian), std::invalid_argument);
}
