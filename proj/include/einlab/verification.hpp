#ifndef EINLAB_VERIFICATION_HPP
#define EINLAB_VERIFICATION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "einlab/probe.hpp"
#include "einlab/report.hpp"
#include "einlab/solv.hpp"

namespace einlab {

struct Verdict {
  bool pass = false;
  double measured = 0;
  double tolerance = 0;
  std::string detail;
};

struct SamplingPlan {
  int samples = 256;
  unsigned seed = 0;
  double gram_margin = 1e-4;  // reject samples with smaller Gram min-eigenvalue
  int oracle_stride = 16;     // intrinsic-Ricci oracle every k-th accepted sample
  double oracle_h = 1e-3;
  double oracle_margin = 0.02;  // run the oracle only well inside the regular set
  double einstein_tol = 0;    // 0: default per derivative mode (1e-5 / 1e-3)
  int threads = 1;
};

struct SampleRecord {
  std::array<double, 4> x{};
  bool accepted = false;
  double gram_min_eig = 0;
  double membership = 0;
  double H = 0;
  double C_est = 0;
  std::array<double, 4> lambda{};
  std::array<double, 4> alpha{};
  double lambda_product = 0;
  double lambda_sep = 0;
  double einstein_residual = 0;
  double eq3_residual = 0;
  int gauss_rank = 0;
  double leaf_geodesy = 0;
  double xi_parallel = 0;
  double leaf_curvature = 0;
  double kahler = 0;
  bool kahler_skipped = false;
  double normal_formula_dev = 0;
  double oracle_rel = -1.0;  // negative when not evaluated at this sample
};

struct SurfaceReport {
  std::string surface;
  std::string space;
  SamplingPlan plan;
  bool expects_einstein = true;
  int attempted = 0;
  int accepted = 0;
  int rejected = 0;
  std::vector<SampleRecord> records;
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, double> aggregates;
  double einstein_constant_estimate = 0;

  bool all_pass() const {
    for (const auto& [k, v] : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

namespace verifydetail {

inline SampleRecord to_record(const SampleEval& s) {
  SampleRecord r;
  r.x = s.x;
  r.accepted = true;
  r.gram_min_eig = s.gram_min_eig;
  r.membership = s.membership;
  r.H = s.H;
  r.C_est = s.C_est;
  for (int i = 0; i < 4; ++i) r.lambda[i] = s.lambda[i];
  for (int i = 0; i < 4; ++i) r.alpha[i] = s.alpha[i];
  r.lambda_product = s.lambda_product;
  r.lambda_sep = s.lambda_sep;
  r.einstein_residual = s.einstein_residual;
  r.eq3_residual = s.eq3_residual;
  r.gauss_rank = s.gauss_rank;
  r.leaf_geodesy = s.leaf_geodesy;
  r.xi_parallel = s.xi_parallel;
  r.leaf_curvature = s.leaf_curvature;
  r.kahler = s.kahler;
  r.kahler_skipped = s.kahler_skipped;
  r.normal_formula_dev = s.normal_formula_dev;
  return r;
}

inline bool excluded_at(const SurfaceChart& surf, double u1, double u2) {
  for (const auto& ball : surf.excluded()) {
    double d1 = u1 - ball.u1, d2 = u2 - ball.u2;
    if (d1 * d1 + d2 * d2 < ball.radius * ball.radius) return true;
  }
  return false;
}

}  // namespace verifydetail

/// Evaluates the whole per-point verification battery over a quasi-random
/// sample of the chart domain and aggregates verdicts at the pinned
/// tolerances. Samples whose chart Gram matrix has minimum eigenvalue below
/// the margin are rejected (the swept hypersurfaces have genuine singular
/// loci); more than 20% rejections aborts the plan.
inline SurfaceReport run_surface_verification(const HypersurfaceChart& chart,
                                              const SamplingPlan& plan) {
  SurfaceReport rep;
  rep.surface = chart.surface->name();
  rep.space = space_name(chart.space());
  rep.plan = plan;
  rep.expects_einstein = rep.surface != "torus_beta0_control";

  DomainBox ub = chart.surface->domain();
  DomainBox tb = chart.tbox;
  const long long offset = 1 + static_cast<long long>(plan.seed) * 1000003LL;

  rep.records.assign(plan.samples, SampleRecord{});
  auto eval_one = [&](int i) {
    std::vector<double> h = halton_point(offset + i, 4);
    std::array<double, 4> x{ub.u1_lo + (ub.u1_hi - ub.u1_lo) * h[0],
                            ub.u2_lo + (ub.u2_hi - ub.u2_lo) * h[1],
                            tb.u1_lo + (tb.u1_hi - tb.u1_lo) * h[2],
                            tb.u2_lo + (tb.u2_hi - tb.u2_lo) * h[3]};
    SampleRecord& rec = rep.records[i];
    rec.x = x;
    if (verifydetail::excluded_at(*chart.surface, x[0], x[1])) return;
    Eigen::Matrix4d g = first_fundamental_form(chart_derivatives(chart, x));
    rec.gram_min_eig = sym_eigenvalues(g).minCoeff();
    if (rec.gram_min_eig < plan.gram_margin) return;
    SampleEval ev = evaluate_sample(chart, x);
    rec = verifydetail::to_record(ev);
    // the stencil-based oracle needs room: curvature quantities grow near
    // the singular loci and would dominate the truncation error
    if (plan.oracle_stride > 0 && (i % plan.oracle_stride) == 0 &&
        rec.gram_min_eig >= plan.oracle_margin)
      rec.oracle_rel = compare_ricci_oracles(chart, x, plan.oracle_h).rel_error;
  };

  int nthreads = std::max(1, plan.threads);
  if (nthreads == 1) {
    for (int i = 0; i < plan.samples; ++i) eval_one(i);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (int t = 0; t < nthreads; ++t)
      futs.push_back(std::async(std::launch::async, [&] {
        int i;
        while ((i = next.fetch_add(1)) < plan.samples) eval_one(i);
      }));
    for (auto& f : futs) f.get();
  }

  rep.attempted = plan.samples;
  for (const auto& r : rep.records)
    r.accepted ? ++rep.accepted : ++rep.rejected;
  if (rep.rejected > 0.2 * rep.attempted)
    throw std::runtime_error("sampling plan: more than 20% of samples rejected as near-singular");

  // aggregates over accepted samples
  const double c_model = ambient_einstein_constant(chart.space());
  const double alpha_model = 0.5 * c_model;
  double max_einstein = 0, min_einstein = 1e300, max_eq3 = 0, max_leaf_geo = 0;
  double max_xi_par = 0, max_leafK_dev = 0, max_alpha_dev = 0, max_lprod_dev = 0;
  double max_lzero = 0, max_kahler = 0, min_sep = 1e300, max_H = 0, max_member = 0;
  double max_normal_dev = 0, max_oracle = 0, mean_C = 0;
  int bad_rank = 0, kahler_counted = 0;
  for (const auto& r : rep.records) {
    if (!r.accepted) continue;
    max_einstein = std::max(max_einstein, r.einstein_residual);
    min_einstein = std::min(min_einstein, r.einstein_residual);
    max_eq3 = std::max(max_eq3, r.eq3_residual);
    max_leaf_geo = std::max(max_leaf_geo, r.leaf_geodesy);
    max_xi_par = std::max(max_xi_par, r.xi_parallel);
    max_leafK_dev = std::max(max_leafK_dev,
                             std::abs(r.leaf_curvature - (4.0 / 3.0) * alpha_model));
    // alpha multiset: ascending eigenvalues must cluster to {0,0,a,a}
    std::array<double, 4> a = r.alpha;
    std::sort(a.begin(), a.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    max_alpha_dev = std::max({max_alpha_dev, std::abs(a[0]), std::abs(a[1]),
                              std::abs(a[2] - alpha_model), std::abs(a[3] - alpha_model)});
    std::array<double, 4> l = r.lambda;
    std::sort(l.begin(), l.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    max_lzero = std::max({max_lzero, std::abs(l[0]), std::abs(l[1])});
    max_lprod_dev = std::max(max_lprod_dev, std::abs(r.lambda_product - alpha_model));
    if (r.gauss_rank != 2) ++bad_rank;
    if (!r.kahler_skipped) {
      max_kahler = std::max(max_kahler, r.kahler);
      ++kahler_counted;
    }
    min_sep = std::min(min_sep, r.lambda_sep);
    max_H = std::max(max_H, std::abs(r.H));
    max_member = std::max(max_member, r.membership);
    max_normal_dev = std::max(max_normal_dev, r.normal_formula_dev);
    if (r.oracle_rel >= 0) max_oracle = std::max(max_oracle, r.oracle_rel);
    mean_C += r.C_est;
  }
  if (rep.accepted > 0) mean_C /= rep.accepted;

  rep.aggregates["max_einstein_residual"] = max_einstein;
  rep.aggregates["min_einstein_residual"] = min_einstein;
  rep.aggregates["max_eq3_residual"] = max_eq3;
  rep.aggregates["max_leaf_geodesy"] = max_leaf_geo;
  rep.aggregates["max_xi_parallel"] = max_xi_par;
  rep.aggregates["max_leaf_curvature_dev"] = max_leafK_dev;
  rep.aggregates["max_alpha_multiset_dev"] = max_alpha_dev;
  rep.aggregates["max_lambda_zero_pair"] = max_lzero;
  rep.aggregates["max_lambda_product_dev"] = max_lprod_dev;
  rep.aggregates["max_kahler_residual"] = max_kahler;
  rep.aggregates["min_lambda_separation"] = min_sep;
  rep.aggregates["max_abs_mean_curvature"] = max_H;
  rep.aggregates["max_membership_residual"] = max_member;
  rep.aggregates["max_normal_formula_dev"] = max_normal_dev;
  rep.aggregates["max_oracle_rel_error"] = max_oracle;
  rep.aggregates["mean_C_estimate"] = mean_C;
  rep.aggregates["kahler_samples"] = kahler_counted;
  // tr(Ric)/4 averaged over samples equals the model constant minus the
  // Gauss-equation defect C
  rep.einstein_constant_estimate = c_model - mean_C;

  auto put = [&](const std::string& key, double measured, double tol, bool less_is_pass,
                 const std::string& detail) {
    Verdict v;
    v.measured = measured;
    v.tolerance = tol;
    v.pass = less_is_pass ? measured <= tol : measured >= tol;
    v.detail = detail;
    rep.verdicts[key] = v;
  };

  const double einstein_tol =
      plan.einstein_tol > 0
          ? plan.einstein_tol
          : (chart.mode == DerivativeMode::Analytic ? 1e-5 : 1e-3);

  put("membership", max_member, 1e-10, true, "max model-membership residual");
  put("normal_formula", max_normal_dev, 1e-8, true,
      "computed unit normal matches the closed-form normal");
  const bool analytic = chart.mode == DerivativeMode::Analytic;
  put("leaf_geodesy", max_leaf_geo, analytic ? 1e-8 : 1e-5, true,
      "second fundamental form of leaves");
  put("xi_parallel", max_xi_par, analytic ? 1e-8 : 1e-5, true,
      "shape operator annihilates leaf directions");
  put("leaf_curvature", max_leafK_dev, 1e-6, true,
      "leaf sectional curvature matches 4/3 alpha");
  put("gauss_rank_2", static_cast<double>(bad_rank), 0.0, true,
      "degenerate Gauss map of corank 2 at every sample");
  if (rep.expects_einstein) {
    put("einstein", max_einstein, einstein_tol, true,
        "relative Ricci deviation from the ambient constant");
    put("eq3", max_eq3, chart.mode == DerivativeMode::Analytic ? 1e-6 : 1e-4, true,
        "normal Jacobi operator equals -S^2 + HS");
    put("alpha_multiset", max_alpha_dev, 1e-7, true, "alpha eigenvalues cluster to {0,0,a,a}");
    put("lambda_structure",
        std::max(max_lzero, max_lprod_dev), analytic ? 1e-7 : 1e-5, true,
        "two vanishing principal curvatures and lambda1 lambda2 = alpha");
    if (kahler_counted > 0)
      put("kahler", max_kahler, 1e-8, true, "parallel complex structure residual");
    if (chart.space() == Space::Sl3So3)
      put("lambda_separation", min_sep, 1e-6, false,
          "principal curvatures separated everywhere");
    if (max_oracle > 0)
      put("ricci_oracle", max_oracle, 1e-3, true,
          "finite-difference intrinsic Ricci agrees with the Gauss-equation route");
  } else {
    put("minimal", max_H, 1e-6, true, "mean curvature vanishes");
    put("einstein", max_einstein, einstein_tol, true,
        "relative Ricci deviation from the ambient constant");
  }
  return rep;
}

// ---- solvmanifold verification -----------------------------------------------

struct SolvReport {
  std::string model_label;
  int dim = 0;
  int rank = 0;
  Eigen::VectorXd mean_curvature_a;
  Eigen::VectorXd ricci_spectrum;
  double einstein_constant = 0;
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, double> aggregates;

  bool all_pass() const {
    for (const auto& [k, v] : verdicts)
      if (!v.pass) return false;
    return true;
  }
};

/// Certifies the Iwasawa metric algebra and a family of its codimension-one
/// hyperplane subalgebras: Einstein property with a shared constant,
/// symmetry of the a-action, nilradical span, positivity of the
/// mean-curvature spectrum, and minimality of each hyperplane.
inline SolvReport run_solv_verification(Model m, const Eigen::VectorXd* xi_user = nullptr,
                                        int n_random_xi = 20, unsigned seed = 0) {
  SolvReport rep;
  rep.model_label = model_name(m);
  RootDatum datum = standard_root_datum(m);
  MetricSolvAlgebra s = build_solvable(datum);
  rep.dim = s.dim;
  rep.rank = s.dim_a;
  rep.mean_curvature_a = s.mean_curvature.head(s.dim_a);
  Eigen::MatrixXd ric = left_invariant_ricci(s);
  rep.ricci_spectrum = sym_eigenvalues(ric);

  EinsteinCheck base = is_einstein(s, 1e-9);
  rep.einstein_constant = base.constant;

  auto put = [&](const std::string& key, double measured, double tol, bool less_is_pass,
                 const std::string& detail) {
    Verdict v;
    v.measured = measured;
    v.tolerance = tol;
    v.pass = less_is_pass ? measured <= tol : measured >= tol;
    v.detail = detail;
    rep.verdicts[key] = v;
  };

  put("einstein_s", base.residual, 1e-9, true, "Iwasawa metric algebra is Einstein");
  put("iwasawa_type", iwasawa_type_residual(s), 1e-12, true,
      "ad_A symmetric over the abelian part");
  put("nilradical", nilradical_span_residual(s), 1e-11, true, "n equals [s,s]");
  put("adAH_positive", mean_curvature_spectrum(s).minCoeff(), 0.0, false,
      "spectrum of ad_{A_H} on n is positive");

  // hyperplane family
  Eigen::VectorXd ah = rep.mean_curvature_a;
  std::vector<Eigen::VectorXd> xis;
  if (xi_user) {
    xis.push_back(xi_user->normalized());
  } else if (s.dim_a == 2) {
    Eigen::VectorXd xi(2);
    xi << -ah[1], ah[0];
    xis.push_back(xi.normalized());
    xis.push_back(-xis[0]);
  } else {
    Rng rng(seed + 17);
    while (static_cast<int>(xis.size()) < n_random_xi) {
      Eigen::VectorXd xi = rng.normal_vector(s.dim_a);
      xi -= ah * xi.dot(ah) / ah.squaredNorm();
      if (xi.norm() < 1e-6) continue;
      xis.push_back(xi.normalized());
    }
  }

  double worst_res = 0, worst_const = 0, worst_tr = 0, worst_type = 0;
  for (const auto& xi : xis) {
    MetricSolvAlgebra h = codim1_subalgebra(s, xi);
    EinsteinCheck eh = is_einstein(h, 1e-9);
    worst_res = std::max(worst_res, eh.residual);
    worst_const = std::max(worst_const, std::abs(eh.constant - base.constant));
    double tr = 0;
    for (int i = 0; i < s.dim_a; ++i) tr += xi[i] * s.ad[i].trace();
    worst_tr = std::max(worst_tr, std::abs(tr));
    worst_type = std::max(worst_type, iwasawa_type_residual(h));
  }
  rep.aggregates["hyperplanes_tested"] = static_cast<double>(xis.size());
  put("einstein_hyperplanes", worst_res, 1e-9, true,
      "every hyperplane subalgebra is Einstein");
  put("shared_constant", worst_const, 1e-9, true,
      "hyperplane Einstein constants match the ambient one");
  put("minimality", worst_tr, 1e-12, true, "tr ad_xi vanishes on the hyperplane");
  put("iwasawa_type_hyperplanes", worst_type, 1e-12, true,
      "hyperplanes remain of Iwasawa type");
  return rep;
}

// ---- JSON encodings ------------------------------------------------------------

inline JsonValue verdicts_json(const std::map<std::string, Verdict>& verdicts) {
  JsonValue v;
  for (const auto& [k, verdict] : verdicts) {
    JsonValue one;
    one["pass"] = verdict.pass;
    one["measured"] = verdict.measured;
    one["tolerance"] = verdict.tolerance;
    one["detail"] = verdict.detail;
    v[k] = one;
  }
  return v;
}

inline JsonValue report_json(const SurfaceReport& rep, bool include_records = true) {
  JsonValue j;
  j["surface"] = rep.surface;
  j["space"] = rep.space;
  j["samples_attempted"] = rep.attempted;
  j["samples_accepted"] = rep.accepted;
  j["samples_rejected"] = rep.rejected;
  j["seed"] = static_cast<double>(rep.plan.seed);
  j["gram_margin"] = rep.plan.gram_margin;
  j["oracle_h"] = rep.plan.oracle_h;
  j["einstein_constant_estimate"] = rep.einstein_constant_estimate;
  j["expects_einstein"] = rep.expects_einstein;
  // orientation anchor of the unit normal, for reproducibility
  j["normal_anchor"] = "closed-form normal of the swept construction";
  JsonValue aggs;
  for (const auto& [k, v] : rep.aggregates) aggs[k] = v;
  j["aggregates"] = aggs;
  j["verdicts"] = verdicts_json(rep.verdicts);
  j["all_pass"] = rep.all_pass();
  if (include_records) {
    JsonValue arr;
    for (const auto& r : rep.records) {
      if (!r.accepted) continue;
      JsonValue one;
      one["u1"] = r.x[0];
      one["u2"] = r.x[1];
      one["t1"] = r.x[2];
      one["t2"] = r.x[3];
      one["H"] = r.H;
      one["C"] = r.C_est;
      JsonValue lam, alp;
      for (double v : r.lambda) lam.push_back(v);
      for (double v : r.alpha) alp.push_back(v);
      one["lambda"] = lam;
      one["alpha"] = alp;
      one["einstein_residual"] = r.einstein_residual;
      one["eq3_residual"] = r.eq3_residual;
      one["gauss_rank"] = r.gauss_rank;
      one["leaf_geodesy"] = r.leaf_geodesy;
      one["xi_parallel"] = r.xi_parallel;
      one["leaf_curvature"] = r.leaf_curvature;
      one["kahler"] = r.kahler_skipped ? JsonValue(nullptr) : JsonValue(r.kahler);
      one["gram_min_eig"] = r.gram_min_eig;
      one["oracle_rel"] = r.oracle_rel < 0 ? JsonValue(nullptr) : JsonValue(r.oracle_rel);
      arr.push_back(one);
    }
    j["records"] = arr;
  }
  return j;
}

inline JsonValue report_json(const SolvReport& rep) {
  JsonValue j;
  j["model"] = rep.model_label;
  j["dim"] = rep.dim;
  j["rank"] = rep.rank;
  JsonValue ah, spec;
  for (int i = 0; i < rep.mean_curvature_a.size(); ++i) ah.push_back(rep.mean_curvature_a[i]);
  for (int i = 0; i < rep.ricci_spectrum.size(); ++i) spec.push_back(rep.ricci_spectrum[i]);
  j["mean_curvature_vector"] = ah;
  j["ricci_spectrum"] = spec;
  j["einstein_constant"] = rep.einstein_constant;
  JsonValue aggs;
  for (const auto& [k, v] : rep.aggregates) aggs[k] = v;
  j["aggregates"] = aggs;
  j["verdicts"] = verdicts_json(rep.verdicts);
  j["all_pass"] = rep.all_pass();
  return j;
}

/// One row per accepted sample, for external plotting.
inline std::string report_csv(const SurfaceReport& rep) {
  std::string out =
      "u1,u2,t1,t2,H,C,lambda1,lambda2,lambda3,lambda4,alpha1,alpha2,alpha3,alpha4,"
      "einstein_residual,eq3_residual,gauss_rank,leaf_geodesy,xi_parallel,leaf_curvature,"
      "kahler,gram_min_eig,oracle_rel\n";
  char buf[64];
  auto add = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out += buf;
  };
  for (const auto& r : rep.records) {
    if (!r.accepted) continue;
    add(r.x[0], ','); add(r.x[1], ','); add(r.x[2], ','); add(r.x[3], ',');
    add(r.H, ','); add(r.C_est, ',');
    for (double v : r.lambda) add(v, ',');
    for (double v : r.alpha) add(v, ',');
    add(r.einstein_residual, ','); add(r.eq3_residual, ',');
    add(static_cast<double>(r.gauss_rank), ',');
    add(r.leaf_geodesy, ','); add(r.xi_parallel, ','); add(r.leaf_curvature, ',');
    add(r.kahler_skipped ? std::nan("") : r.kahler, ',');
    add(r.gram_min_eig, ',');
    add(r.oracle_rel, '\n');
  }
  return out;
}

}  // namespace einlab

#endif
