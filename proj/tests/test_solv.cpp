#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "einlab/solv.hpp"

using namespace einlab;

TEST_CASE("iwasawa: refuses the compact model") {
  RootDatum datum = standard_root_datum(Model::Su3);
  CHECK_THROWS_AS(iwasawa(datum), std::invalid_argument);
}

TEST_CASE("iwasawa sl3: n equals the strictly upper triangular matrices") {
  RootDatum datum = standard_root_datum(Model::Sl3R);
  IwasawaParts parts = iwasawa(datum);
  CHECK(parts.k.size() == 3);
  CHECK(parts.a.size() == 2);
  CHECK(parts.n.size() == 3);

  // brute-force span comparison against the upper triangular nilpotent algebra
  Eigen::MatrixXd stack(18, 3);
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXcd m = parts.n[c].m;
    for (int i = 0; i < 9; ++i) stack(i, c) = m(i / 3, i % 3).real();
    for (int i = 0; i < 9; ++i) stack(9 + i, c) = m(i / 3, i % 3).imag();
  }
  // each n-basis vector must vanish on and below the diagonal
  for (int c = 0; c < 3; ++c) {
    Eigen::MatrixXcd m = parts.n[c].m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j <= i; ++j) CHECK(std::abs(m(i, j)) < 1e-12);
  }
  CHECK(numeric_rank(stack, 1e-10) == 3);
}

TEST_CASE("iwasawa: dimension counts and lower central series") {
  RootDatum d3 = standard_root_datum(Model::Sl3R);
  IwasawaParts p3 = iwasawa(d3);
  CHECK(p3.k.size() + p3.a.size() + p3.n.size() == 8);

  RootDatum d4 = standard_root_datum(Model::Sl4R);
  IwasawaParts p4 = iwasawa(d4);
  CHECK(p4.k.size() + p4.a.size() + p4.n.size() == 15);

  MetricSolvAlgebra s3 = build_solvable(d3);
  auto series3 = lower_central_series_dims(s3);
  REQUIRE(series3.size() >= 2);
  CHECK(series3.back() == 0);

  MetricSolvAlgebra s4 = build_solvable(d4);
  auto series4 = lower_central_series_dims(s4);
  CHECK(series4.back() == 0);
  CHECK(series4.size() <= 4);  // terminates in at most 3 steps
}

TEST_CASE("mean curvature vector: defining property and positivity") {
  for (Model m : {Model::Sl3R, Model::Sl4R}) {
    RootDatum datum = standard_root_datum(m);
    MetricSolvAlgebra s = build_solvable(datum);
    Eigen::VectorXd ah = mean_curvature_vector(s);

    // <A_H, A_i> = tr ad_{A_i} on the orthonormal basis
    for (int i = 0; i < s.dim_a; ++i)
      CHECK(std::abs(ah[i] - s.ad[i].trace()) < 1e-12);

    // A_H is proportional to the sum of the positive roots
    Eigen::VectorXd root_sum = Eigen::VectorXd::Zero(s.dim_a);
    for (const auto& r : datum.positive)
      root_sum += r.multiplicity * r.coords;
    Eigen::VectorXd ah_a = ah.head(s.dim_a);
    double cosang = ah_a.dot(root_sum) / (ah_a.norm() * root_sum.norm());
    CHECK(cosang == doctest::Approx(1.0).epsilon(1e-11));
    CHECK((ah_a - root_sum).norm() < 1e-9 * root_sum.norm());

    // all eigenvalues of ad_{A_H} on n are positive
    Eigen::VectorXd spec = mean_curvature_spectrum(s);
    CHECK(spec.minCoeff() > 0.0);
  }
}

TEST_CASE("abelian algebra: zero mean curvature and flat metric") {
  std::vector<Eigen::MatrixXd> ad(3, Eigen::MatrixXd::Zero(3, 3));
  MetricSolvAlgebra s = make_algebra(3, ad);
  CHECK(mean_curvature_vector(s).norm() == 0.0);
  CHECK(left_invariant_ricci(s).norm() == 0.0);
}

TEST_CASE("hyperbolic plane oracle: [A,X] = X gives Ric = -id") {
  std::vector<Eigen::MatrixXd> ad(2, Eigen::MatrixXd::Zero(2, 2));
  ad[0](1, 1) = 1.0;   // [e0, e1] = e1
  ad[1](1, 0) = -1.0;  // [e1, e0] = -e1
  MetricSolvAlgebra s = make_algebra(1, ad);
  Eigen::MatrixXd ric = left_invariant_ricci(s);
  CHECK((ric + Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);
  EinsteinCheck chk = is_einstein(s);
  CHECK(chk.einstein);
  CHECK(chk.constant == doctest::Approx(-1.0));
}

TEST_CASE("iwasawa metric algebras are Einstein with the ambient constant") {
  RootDatum d3 = standard_root_datum(Model::Sl3R);
  MetricSolvAlgebra s3 = build_solvable(d3);
  EinsteinCheck e3 = is_einstein(s3, 1e-10);
  CHECK(e3.einstein);
  CHECK(e3.constant == doctest::Approx(-0.75).epsilon(1e-10));

  RootDatum d4 = standard_root_datum(Model::Sl4R);
  MetricSolvAlgebra s4 = build_solvable(d4);
  EinsteinCheck e4 = is_einstein(s4, 1e-10);
  CHECK(e4.einstein);
  CHECK(e4.constant == doctest::Approx(model_einstein_constant(Model::Sl4R)).epsilon(1e-9));
}

TEST_CASE("iwasawa-type audit: ad_A symmetric, nilradical equals [s,s]") {
  for (Model m : {Model::Sl3R, Model::Sl4R}) {
    MetricSolvAlgebra s = build_solvable(standard_root_datum(m));
    CHECK(iwasawa_type_residual(s) < 1e-12);
    CHECK(nilradical_span_residual(s) < 1e-11);
  }
}

TEST_CASE("codim-1 subalgebra: closure, inherited Einstein constant, minimality") {
  RootDatum datum = standard_root_datum(Model::Sl3R);
  MetricSolvAlgebra s = build_solvable(datum);
  Eigen::VectorXd ah = s.mean_curvature.head(s.dim_a);

  // unique unit xi orthogonal to A_H inside the 2-dim a
  Eigen::VectorXd xi(2);
  xi << -ah[1], ah[0];
  xi.normalize();

  MetricSolvAlgebra h = codim1_subalgebra(s, xi);
  CHECK(h.dim == s.dim - 1);
  EinsteinCheck eh = is_einstein(h, 1e-10);
  CHECK(eh.einstein);
  CHECK(eh.constant == doctest::Approx(-0.75).epsilon(1e-10));
  CHECK(iwasawa_type_residual(h) < 1e-12);

  // minimality: tr ad_xi on the hyperplane equals <A_H, xi> = 0
  Eigen::VectorXd xi_full = Eigen::VectorXd::Zero(s.dim);
  xi_full.head(2) = xi;
  double tr = 0.0;
  for (int i = 0; i < s.dim; ++i) tr += xi_full[i] * s.ad[i].trace();
  CHECK(std::abs(tr) < 1e-12);

  // the mean curvature vector is retained
  Eigen::VectorXd ah_h = h.mean_curvature;
  CHECK(ah_h.norm() == doctest::Approx(ah.norm()).epsilon(1e-11));
}

TEST_CASE("codim-1 requires orthogonality to the mean curvature vector") {
  MetricSolvAlgebra s = build_solvable(standard_root_datum(Model::Sl3R));
  Eigen::VectorXd bad = s.mean_curvature.head(s.dim_a).normalized();
  CHECK_THROWS_AS(codim1_subalgebra(s, bad), std::invalid_argument);
}

TEST_CASE("sl4: twenty random xi all Einstein with one constant, minimal") {
  MetricSolvAlgebra s = build_solvable(standard_root_datum(Model::Sl4R));
  Eigen::VectorXd ah = s.mean_curvature.head(s.dim_a);
  double c_ref = is_einstein(s).constant;

  Rng rng(61);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd xi = rng.normal_vector(s.dim_a);
    xi -= ah * xi.dot(ah) / ah.squaredNorm();
    if (xi.norm() < 1e-6) continue;
    xi.normalize();
    MetricSolvAlgebra h = codim1_subalgebra(s, xi);
    EinsteinCheck eh = is_einstein(h, 1e-9);
    CHECK(eh.einstein);
    CHECK(eh.constant == doctest::Approx(c_ref).epsilon(1e-9));
    double tr = 0.0;
    for (int i = 0; i < s.dim_a; ++i) tr += xi[i] * s.ad[i].trace();
    CHECK(std::abs(tr) < 1e-12);
  }
}

TEST_CASE("sl4: different xi give non-isometric hyperplane algebras") {
  MetricSolvAlgebra s = build_solvable(standard_root_datum(Model::Sl4R));
  Eigen::VectorXd ah = s.mean_curvature.head(s.dim_a);

  // two non-proportional unit vectors orthogonal to A_H
  Eigen::MatrixXd perp = Eigen::FullPivHouseholderQR<Eigen::MatrixXd>(
                             Eigen::MatrixXd(ah))
                             .matrixQ()
                             .rightCols(2);
  Eigen::VectorXd xi1 = perp.col(0), xi2 = (0.6 * perp.col(0) + 0.8 * perp.col(1)).eval();

  MetricSolvAlgebra h1 = codim1_subalgebra(s, xi1);
  MetricSolvAlgebra h2 = codim1_subalgebra(s, xi2);

  // local isometry invariant: squared norm of the curvature tensor
  auto curv_norm2 = [](const MetricSolvAlgebra& h) {
    auto gamma = koszul_connection(h);
    const int d = h.dim;
    double acc = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            double term = 0.0;
            for (int m2 = 0; m2 < d; ++m2) {
              term += gamma[j](m2, k) * gamma[i](l, m2);
              term -= gamma[i](m2, k) * gamma[j](l, m2);
            }
            Eigen::VectorXd br = h.ad[i].col(j);
            for (int m2 = 0; m2 < d; ++m2) term -= br[m2] * gamma[m2](l, k);
            acc += term * term;
          }
    return acc;
  };
  double n1 = curv_norm2(h1), n2 = curv_norm2(h2);
  CHECK(std::abs(n1 - n2) > 1e-6);

  // both are Einstein with the same constant nevertheless
  CHECK(is_einstein(h1, 1e-9).einstein);
  CHECK(is_einstein(h2, 1e-9).einstein);
}

TEST_CASE("perturbed structure constants are rejected as Einstein") {
  MetricSolvAlgebra s = build_solvable(standard_root_datum(Model::Sl3R));
  Rng rng(71);
  MetricSolvAlgebra p = s;
  for (int i = 0; i < p.dim; ++i)
    for (int j = 0; j < p.dim; ++j)
      for (int k = 0; k < p.dim; ++k) {
        if (i >= j) continue;
        double bump = 0.01 * rng.normal() * std::max(1.0, std::abs(p.ad[i](k, j)));
        p.ad[i](k, j) += bump;
        p.ad[j](k, i) -= bump;  // keep antisymmetry of the bracket
      }
  EinsteinCheck chk = is_einstein(p, 1e-3);
  CHECK_FALSE(chk.einstein);
}
