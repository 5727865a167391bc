#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "einlab/verification.hpp"

using namespace einlab;

namespace {

HypersurfaceChart hyper(const char* name,
                        DerivativeMode mode = DerivativeMode::Analytic) {
  return make_hypersurface(builtin_surface(name), mode);
}

const std::array<double, 4> kGeneric{0.3, 0.8, 0.45, 0.75};
const std::array<double, 4> kGeneric2{1.1, 0.2, -0.5, 0.3};

}  // namespace

TEST_CASE("first fundamental form: positive at generic points, degenerate on the caustic") {
  auto hc = hyper("legendrian_torus");
  Eigen::Matrix4d g = first_fundamental_form(hc, kGeneric);
  Eigen::VectorXd ev = sym_eigenvalues(g);
  CHECK(ev.minCoeff() > 0.05);

  // the swept hypersurface is singular along a curve through t = 0 on every
  // leaf: the chart Gram matrix degenerates there
  Eigen::Matrix4d g0 = first_fundamental_form(hc, {0.3, 0.8, 0.0, 0.0});
  CHECK(std::abs(sym_eigenvalues(g0).minCoeff()) < 1e-12);
  CHECK_THROWS_AS(evaluate_sample(hc, {0.3, 0.8, 0.0, 0.0}), std::runtime_error);
}

TEST_CASE("unit normal: orthogonal to the chart, matches the closed form") {
  for (const char* nm : {"legendrian_torus", "legendrian_sphere", "hyperboloid",
                         "hexenhut", "rank1_plane", "ruled:cayley"}) {
    auto hc = hyper(nm);
    SampleEval s = evaluate_sample(hc, kGeneric);
    for (int a = 0; a < 4; ++a)
      CHECK(std::abs(ambient_inner(s.xi_amb, s.cd.d[a])) < 1e-11);
    CHECK(std::abs(ambient_inner(s.xi_amb, s.xi_amb) - 1.0) < 1e-12);
    CHECK(s.normal_formula_dev < 1e-10);
  }
}

TEST_CASE("base configuration normal: the closed form gives the quoted matrices") {
  // compact side, base frame: (1/sqrt 6) i (x - 3 Z Z^t) at x = I, Z = e1
  ChartDerivs cd;
  cd.space = Space::Su3So3;
  cd.x = base_point(Space::Su3So3);
  cd.label_Z = Eigen::Vector3cd(1, 0, 0);
  AmbientVec xi = formula_normal(cd);
  Eigen::Matrix3cd expect = Eigen::Matrix3cd::Zero();
  const std::complex<double> iu(0, 1);
  expect(0, 0) = -2.0 * iu / std::sqrt(6.0);
  expect(1, 1) = iu / std::sqrt(6.0);
  expect(2, 2) = iu / std::sqrt(6.0);
  CHECK((xi.v - expect).norm() < 1e-14);

  // noncompact side at the base pair
  ChartDerivs cds;
  cds.space = Space::Sl3So3;
  cds.x = base_point(Space::Sl3So3);
  cds.g_pt_r = Eigen::Matrix3d::Identity();
  AmbientVec xis = formula_normal(cds);
  Eigen::Vector3d d(-2, 1, 1);
  CHECK((xis.v1 - Eigen::Matrix3d(d.asDiagonal()) / std::sqrt(6.0)).norm() < 1e-14);
  CHECK((xis.v2 + Eigen::Matrix3d(d.asDiagonal()) / std::sqrt(6.0)).norm() < 1e-14);
  CHECK(std::abs(ambient_inner(xis, xis) - 1.0) < 1e-14);
}

TEST_CASE("shape operator eigenstructure on the Einstein constructions") {
  for (const char* nm : {"legendrian_torus", "legendrian_sphere"}) {
    auto hc = hyper(nm);
    for (const auto& x : {kGeneric, kGeneric2}) {
      SampleEval s = evaluate_sample(hc, x);
      CHECK(std::abs(s.lambda_product - 0.375) < 1e-12);
      std::array<double, 4> l{s.lambda[0], s.lambda[1], s.lambda[2], s.lambda[3]};
      std::sort(l.begin(), l.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
      CHECK(std::abs(l[0]) < 1e-12);
      CHECK(std::abs(l[1]) < 1e-12);
      CHECK(s.H == doctest::Approx(s.S.trace()).epsilon(1e-14));
    }
  }
  for (const char* nm : {"hyperboloid", "hexenhut", "rank1_plane", "ruled:cayley"}) {
    auto hc = hyper(nm);
    SampleEval s = evaluate_sample(hc, kGeneric);
    CHECK(std::abs(s.lambda_product + 0.375) < 1e-12);
    CHECK(s.lambda_sep > 1e-3);  // opposite signs: never degenerate
  }
}

TEST_CASE("normal Jacobi operator restriction: multiset {a,a,0,0}") {
  auto check_alpha = [](const SampleEval& s, double a_expect) {
    std::array<double, 4> a{s.alpha[0], s.alpha[1], s.alpha[2], s.alpha[3]};
    std::sort(a.begin(), a.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    CHECK(std::abs(a[0]) < 1e-12);
    CHECK(std::abs(a[1]) < 1e-12);
    CHECK(a[2] == doctest::Approx(a_expect).epsilon(1e-11));
    CHECK(a[3] == doctest::Approx(a_expect).epsilon(1e-11));
  };
  check_alpha(evaluate_sample(hyper("legendrian_torus"), kGeneric), 0.375);
  check_alpha(evaluate_sample(hyper("legendrian_sphere"), kGeneric2), 0.375);
  check_alpha(evaluate_sample(hyper("hyperboloid"), kGeneric), -0.375);
  check_alpha(evaluate_sample(hyper("hexenhut"), kGeneric2), -0.375);
}

TEST_CASE("gauss equation ricci: Einstein at the ambient constant, C = 0") {
  SampleEval s = evaluate_sample(hyper("legendrian_torus"), kGeneric);
  CHECK((s.Ric - 0.75 * Eigen::Matrix4d::Identity()).norm() < 1e-12);
  CHECK(std::abs(s.C_est) < 1e-12);
  CHECK(s.eq3_residual < 1e-12);

  SampleEval sh = evaluate_sample(hyper("hyperboloid"), kGeneric2);
  CHECK((sh.Ric + 0.75 * Eigen::Matrix4d::Identity()).norm() < 1e-12);
}

TEST_CASE("parallel minimal control: H vanishes but the Einstein property fails") {
  auto hc = hyper("torus_beta0_control");
  for (const auto& x : {kGeneric, kGeneric2}) {
    SampleEval s = evaluate_sample(hc, x);
    CHECK(std::abs(s.H) < 1e-12);
    CHECK(s.einstein_residual > 1e-2);
    // the leaf structure survives: still swept by totally geodesic leaves
    CHECK(s.leaf_geodesy < 1e-12);
    CHECK(s.xi_parallel < 1e-12);
    // the defect C is nonzero, consistent with the broken Gauss relation
    CHECK(std::abs(s.C_est) > 1e-2);
  }
}

TEST_CASE("gauss map rank: corank two for every swept construction") {
  for (const char* nm : {"legendrian_torus", "legendrian_sphere", "torus_beta0_control",
                         "hyperboloid", "hexenhut", "rank1_plane", "ruled:cayley"}) {
    SampleEval s = evaluate_sample(hyper(nm), kGeneric);
    CHECK(s.gauss_rank == 2);
  }
}

TEST_CASE("kahler residual: near zero on Einstein constructions, frame-swap sanity") {
  SampleEval s = evaluate_sample(hyper("legendrian_torus"), kGeneric);
  REQUIRE_FALSE(s.kahler_skipped);
  CHECK(s.kahler < 1e-12);
  SampleEval sh = evaluate_sample(hyper("hexenhut"), kGeneric);
  REQUIRE_FALSE(sh.kahler_skipped);
  CHECK(sh.kahler < 1e-12);

  // index bookkeeping: rotating the leaf frame by an angle rotates the
  // residual pair by the same angle. Checked on the control surface, whose
  // residuals are far from zero.
  const Model mo_id = Model::Su3;
  auto hc = hyper("torus_beta0_control");
  SampleEval se = evaluate_sample(hc, kGeneric);
  std::array<AlgebraElement, 4> ep{
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(3, 3)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(3, 3)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(3, 3)),
      AlgebraElement(mo_id, Eigen::MatrixXcd::Zero(3, 3))};
  for (int i = 0; i < 4; ++i) {
    AmbientVec v = 0.0 * se.tb[0];
    for (int k = 0; k < 5; ++k) v = v + se.onb(i, k) * se.tb[k];
    ep[i] = transport_with_frame(v, se.cd.g_pt, se.cd.g_pt_r);
  }
  AlgebraElement xi = transport_with_frame(se.xi_amb, se.cd.g_pt, se.cd.g_pt_r);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(se.S);
  Eigen::Vector4d evs = es.eigenvalues();
  std::array<int, 4> idx{0, 1, 2, 3};
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return std::abs(evs[a]) > std::abs(evs[b]); });
  auto mk = [&](int which) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
    for (int j = 0; j < 4; ++j) acc += es.eigenvectors()(j, which) * ep[j].m;
    return AlgebraElement(mo_id, acc);
  };
  AlgebraElement x1 = mk(idx[0]), x2 = mk(idx[1]);
  auto residual_pair = [&](const AlgebraElement& x3, const AlgebraElement& x4) {
    return std::array<double, 2>{
        curvature_quad(x4, x1, x1, xi) + curvature_quad(x3, x1, x2, xi),
        curvature_quad(x4, x1, x2, xi) - curvature_quad(x3, x1, x1, xi)};
  };
  auto r0 = residual_pair(ep[2], ep[3]);
  const double phi = 0.3, c = std::cos(phi), sn = std::sin(phi);
  AlgebraElement x3r(mo_id, c * ep[2].m + sn * ep[3].m);
  AlgebraElement x4r(mo_id, -sn * ep[2].m + c * ep[3].m);
  auto rr = residual_pair(x3r, x4r);
  CHECK(rr[0] == doctest::Approx(c * r0[0] + sn * r0[1]).epsilon(1e-10));
  CHECK(rr[1] == doctest::Approx(-sn * r0[0] + c * r0[1]).epsilon(1e-10));
}

TEST_CASE("intrinsic ricci oracle: agreement and second-order convergence") {
  for (const char* nm : {"legendrian_torus", "hyperboloid", "rank1_plane"}) {
    auto hc = hyper(nm);
    double e1 = compare_ricci_oracles(hc, kGeneric, 1e-3).rel_error;
    double e2 = compare_ricci_oracles(hc, kGeneric, 5e-4).rel_error;
    CHECK(e1 < 1e-3);
    CHECK(e2 < e1 / 2.5);  // observed second order: ratio approaches 4
  }
  // conventions also agree off the Einstein family
  double ec = compare_ricci_oracles(hyper("torus_beta0_control"), kGeneric, 1e-3).rel_error;
  CHECK(ec < 1e-3);
}

TEST_CASE("leaf-only intrinsic curvature: the two-parameter block gives +-(1/2) g") {
  // restrict the oracle machinery to the leaf block: the t-part of the
  // intrinsic Ricci of the 4-chart is dominated by the product structure, so
  // instead check the leaf sectional curvature through the sample evaluator
  SampleEval s = evaluate_sample(hyper("legendrian_sphere"), kGeneric);
  CHECK(s.leaf_curvature == doctest::Approx(0.5).epsilon(1e-10));
  SampleEval sh = evaluate_sample(hyper("ruled:cayley"), kGeneric);
  CHECK(sh.leaf_curvature == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("finite-difference chart mode reproduces the analytic quantities") {
  auto ha = hyper("legendrian_torus");
  auto hf = hyper("legendrian_torus", DerivativeMode::FiniteDifference);
  SampleEval sa = evaluate_sample(ha, kGeneric), sf = evaluate_sample(hf, kGeneric);
  CHECK(std::abs(sa.lambda_product - sf.lambda_product) < 1e-6);
  CHECK(sf.einstein_residual < 1e-6);
  CHECK((sa.G - sf.G).norm() < 1e-9);
}

TEST_CASE("singular locus probes match the predicted families") {
  for (const char* nm : {"legendrian_torus", "legendrian_sphere"}) {
    ProbeResult r = singular_locus_probe(hyper(nm), 0.7, 1.3);
    CHECK(r.family_predicted);
    CHECK(r.max_sigma_on_family < 1e-6);
    CHECK(r.max_transverse_offset < 1e-4);
  }
  for (const char* nm : {"hyperboloid", "hexenhut", "ruled:cayley"}) {
    ProbeResult r = singular_locus_probe(hyper(nm), 0.4, 0.25, 2.0);
    CHECK(r.family_predicted);
    CHECK(r.max_sigma_on_family < 1e-6);
    CHECK(r.max_transverse_offset < 1e-4);
  }
  // the plane pair sweeps a complete solvmanifold: no rank drops
  ProbeResult r = no_drop_scan(hyper("rank1_plane"), 0.3, -0.2, 5.0);
  CHECK(r.min_sigma_off_family > 1e-3);
  // and the family-probe preconditions fail for it
  CHECK_THROWS_AS(singular_locus_probe(hyper("rank1_plane"), 0.3, -0.2),
                  std::invalid_argument);
}

TEST_CASE("verification reports: verdicts, internal consistency, determinism") {
  SamplingPlan plan;
  plan.samples = 48;
  plan.seed = 0;
  SurfaceReport rep = run_surface_verification(hyper("legendrian_torus"), plan);
  CHECK(rep.all_pass());
  CHECK(rep.accepted > 40);
  CHECK(rep.einstein_constant_estimate == doctest::Approx(0.75).epsilon(1e-9));

  // per-record internal consistency: H equals the trace of the recorded
  // lambda multiset
  for (const auto& r : rep.records) {
    if (!r.accepted) continue;
    double tr = r.lambda[0] + r.lambda[1] + r.lambda[2] + r.lambda[3];
    CHECK(std::abs(tr - r.H) < 1e-12);
  }

  // byte determinism of the serialized report for a fixed seed
  std::string a = report_json(rep).dump(2);
  SurfaceReport rep2 = run_surface_verification(hyper("legendrian_torus"), plan);
  std::string b = report_json(rep2).dump(2);
  CHECK(a == b);

  // thread count must not change the bytes either
  SamplingPlan plan4 = plan;
  plan4.threads = 4;
  SurfaceReport rep4 = run_surface_verification(hyper("legendrian_torus"), plan4);
  CHECK(report_json(rep4).dump(2) == a);

  // different seed draws different samples
  SamplingPlan plan_s = plan;
  plan_s.seed = 7;
  SurfaceReport rep_s = run_surface_verification(hyper("legendrian_torus"), plan_s);
  CHECK(report_json(rep_s).dump(2) != a);

  // round trip through an external JSON parser preserves the numbers
  nlohmann::json parsed = nlohmann::json::parse(a);
  CHECK(parsed.at("samples_accepted").get<int>() == rep.accepted);
  CHECK(parsed.at("verdicts").at("einstein").at("pass").get<bool>());
  CHECK(parsed.at("aggregates").at("max_einstein_residual").get<double>() ==
        rep.aggregates.at("max_einstein_residual"));

  // CSV row count equals the number of accepted samples
  std::string csv = report_csv(rep);
  int rows = -1;  // header
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == rep.accepted);
}

TEST_CASE("control report: minimal passes while the Einstein verdict fails") {
  SamplingPlan plan;
  plan.samples = 32;
  SurfaceReport rep = run_surface_verification(hyper("torus_beta0_control"), plan);
  CHECK_FALSE(rep.expects_einstein);
  CHECK(rep.verdicts.at("minimal").pass);
  CHECK_FALSE(rep.verdicts.at("einstein").pass);
  CHECK_FALSE(rep.all_pass());
  CHECK(rep.aggregates.at("min_einstein_residual") > 1e-2);
}

TEST_CASE("sampling plans centered on the singular set are rejected as errors") {
  // a leaf-coordinate box hugging the caustic curve rejects nearly all draws
  HypersurfaceChart chart = make_hypersurface(builtin_surface("legendrian_torus"));
  chart.tbox = DomainBox{-1e-3, 1e-3, -1e-3, 1e-3};
  SamplingPlan plan;
  plan.samples = 32;
  CHECK_THROWS_AS(run_surface_verification(chart, plan), std::runtime_error);
}

TEST_CASE("sampling margin rejects the caustic band without starving the plan") {
  SamplingPlan plan;
  plan.samples = 128;
  SurfaceReport rep = run_surface_verification(hyper("hyperboloid"), plan);
  CHECK(rep.rejected < 0.2 * rep.attempted);
  for (const auto& r : rep.records)
    if (r.accepted) CHECK(r.gram_min_eig >= plan.gram_margin);
}
