// einlab: construction and verification of the Einstein hypersurface
// families of the rank-two symmetric-space models.
//
// Subcommands: roots, iwasawa, surface-check, verify, singular-probe.
// Exit codes: 0 all verdicts pass, 1 verdict failure, 2 usage error,
// 3 output I/O failure, 4 unreadable or invalid surface spec.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "einlab/verification.hpp"

using namespace einlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitSpec = 4;

struct SpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    return kExitIo;
  }
  out << content;
  return out.good() ? kExitOk : kExitIo;
}

Model parse_model(const std::string& name) {
  if (name == "sl3") return Model::Sl3R;
  if (name == "sl4") return Model::Sl4R;
  if (name == "su3") return Model::Su3;
  throw std::invalid_argument("unknown model '" + name + "'");
}

std::shared_ptr<SurfaceChart> load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read surface spec '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SpecError(std::string("surface spec parse error: ") + e.what());
  }
  try {
    std::string model = j.at("model").get<std::string>();
    DomainBox box;
    auto dom = j.at("domain");
    box.u1_lo = dom.at(0).at(0).get<double>();
    box.u1_hi = dom.at(0).at(1).get<double>();
    box.u2_lo = dom.at(1).at(0).get<double>();
    box.u2_hi = dom.at(1).at(1).get<double>();
    std::vector<ExcludedBall> holes;
    if (j.contains("excluded"))
      for (const auto& ball : j.at("excluded")) {
        ExcludedBall b;
        b.u1 = ball.at("u").at(0).get<double>();
        b.u2 = ball.at("u").at(1).get<double>();
        b.radius = ball.at("radius").get<double>();
        holes.push_back(b);
      }
    std::string name = j.value("name", std::string("user:") + model);
    auto exprs = j.at("expressions");

    if (model == "legendrian") {
      if (exprs.size() != 6)
        throw SpecError("legendrian spec needs 6 expressions (re/im per component)");
      std::array<std::string, 6> e;
      for (int i = 0; i < 6; ++i) e[i] = exprs.at(i).get<std::string>();
      return std::make_shared<ExprLegendrianChart>(e, box, holes, name);
    }
    if (model == "para") {
      if (exprs.size() != 6) throw SpecError("para spec needs 6 expressions (p then q)");
      std::array<std::string, 6> e;
      for (int i = 0; i < 6; ++i) e[i] = exprs.at(i).get<std::string>();
      return std::make_shared<ExprParaChart>(e, box, holes, name);
    }
    if (model == "affine") {
      if (exprs.size() != 3)
        throw SpecError("affine spec needs 3 expressions for the position vector");
      std::array<std::string, 3> e;
      for (int i = 0; i < 3; ++i) e[i] = exprs.at(i).get<std::string>();
      return std::make_shared<ExprAffineChart>(e, box, holes, name);
    }
    if (model == "ruled") {
      if (exprs.size() != 3) throw SpecError("ruled spec needs 3 curve expressions in s");
      std::array<std::string, 3> e;
      for (int i = 0; i < 3; ++i) e[i] = exprs.at(i).get<std::string>();
      return std::make_shared<RuledChart>(std::make_shared<ExprCurve>(e, name), box);
    }
    throw SpecError("unknown surface model '" + model + "' in spec");
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError(std::string("surface spec error: ") + e.what());
  }
}

std::shared_ptr<SurfaceChart> resolve_surface(const std::string& arg, bool* is_user) {
  if (arg.size() > 5 && arg.substr(arg.size() - 5) == ".json") {
    if (is_user) *is_user = true;
    return load_spec_file(arg);
  }
  if (is_user) *is_user = false;
  return builtin_surface(arg);
}

void print_verdicts(const std::map<std::string, Verdict>& verdicts) {
  for (const auto& [key, v] : verdicts) {
    std::printf("  [%s] %-26s measured %.6e  tol %.1e  (%s)\n", v.pass ? "PASS" : "FAIL",
                key.c_str(), v.measured, v.tolerance, v.detail.c_str());
  }
}

int cmd_roots(const std::string& model_name, const std::string& json_path) {
  Model m = parse_model(model_name);
  RootDatum datum = standard_root_datum(m);
  const AlgebraModel& mo = datum.algebra();

  std::printf("restricted root data of %s (rank %d, dim p = %d)\n", model_name.c_str(),
              mo.rank(), mo.dim_p());
  int idx = 0;
  for (const auto& root : datum.positive) {
    std::printf("  root %d: [", ++idx);
    for (int i = 0; i < root.coords.size(); ++i)
      std::printf("%s%.12f", i ? ", " : "", root.coords[i]);
    std::printf("]  multiplicity %d\n", root.multiplicity);
  }
  int total = datum.root_space_total();
  std::printf("dimension audit: sum m_beta + rank = %d + %d = %d (dim p = %d)\n", total,
              mo.rank(), total + mo.rank(), mo.dim_p());

  if (!json_path.empty()) {
    JsonValue j;
    j["model"] = model_name;
    j["rank"] = mo.rank();
    j["dim_p"] = mo.dim_p();
    JsonValue roots;
    for (const auto& root : datum.positive) {
      JsonValue one;
      JsonValue coords;
      for (int i = 0; i < root.coords.size(); ++i) coords.push_back(root.coords[i]);
      one["coords"] = coords;
      one["multiplicity"] = root.multiplicity;
      roots.push_back(one);
    }
    j["positive_roots"] = roots;
    JsonValue audit;
    audit["root_space_total"] = total;
    audit["rank"] = mo.rank();
    audit["dim_p"] = mo.dim_p();
    audit["consistent"] = (total + mo.rank() == mo.dim_p());
    j["dimension_audit"] = audit;
    int rc = write_file(json_path, j.dump(2) + "\n");
    if (rc != kExitOk) return rc;
  }
  return kExitOk;
}

int cmd_iwasawa(const std::string& model_name, const std::string& xi_csv,
                const std::string& json_path) {
  Model m = parse_model(model_name);
  if (m == Model::Su3) {
    std::cerr << "error: the Iwasawa construction requires a noncompact model\n";
    return kExitUsage;
  }
  std::optional<Eigen::VectorXd> xi;
  if (!xi_csv.empty()) {
    std::vector<double> vals;
    std::stringstream ss(xi_csv);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    Eigen::VectorXd v(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    xi = v;
  }

  SolvReport rep = run_solv_verification(m, xi ? &*xi : nullptr);
  std::printf("Iwasawa metric algebra of %s: dim %d = %d (abelian) + %d (nilradical)\n",
              model_name.c_str(), rep.dim, rep.rank, rep.dim - rep.rank);
  std::printf("  A_H = [");
  for (int i = 0; i < rep.mean_curvature_a.size(); ++i)
    std::printf("%s%.12f", i ? ", " : "", rep.mean_curvature_a[i]);
  std::printf("]\n  Einstein constant %.12f\n", rep.einstein_constant);
  print_verdicts(rep.verdicts);

  if (!json_path.empty()) {
    int rc = write_file(json_path, report_json(rep).dump(2) + "\n");
    if (rc != kExitOk) return rc;
  }
  return rep.all_pass() ? kExitOk : kExitVerdictFail;
}

int cmd_surface_check(const std::string& surface_arg, int grid, const std::string& csv_path,
                      const std::string& json_path) {
  bool user = false;
  auto chart = resolve_surface(surface_arg, &user);
  DomainBox b = chart->domain();

  double worst_a = 0, worst_b = 0, worst_c = 0, worst_d = 0;
  std::string csv;
  const bool legendrian = chart->surface_model() == SurfaceModel::Legendrian;
  csv = legendrian ? "u1,u2,unit_norm,contact\n"
                   : "u1,u2,normalization,contact1,contact2,special\n";
  char buf[200];
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      double u1 = b.u1_lo + (b.u1_hi - b.u1_lo) * (i + 0.5) / grid;
      double u2 = b.u2_lo + (b.u2_hi - b.u2_lo) * (j + 0.5) / grid;
      bool skip = false;
      for (const auto& ball : chart->excluded()) {
        double d1 = u1 - ball.u1, d2 = u2 - ball.u2;
        if (d1 * d1 + d2 * d2 < ball.radius * ball.radius) skip = true;
      }
      if (skip) continue;
      if (legendrian) {
        LegendrianResiduals r = legendrian_residual(*chart, u1, u2);
        worst_a = std::max(worst_a, r.unit_norm);
        worst_b = std::max(worst_b, r.contact);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", u1, u2, r.unit_norm,
                      r.contact);
      } else {
        ParaResiduals r = para_residuals(*chart, u1, u2);
        worst_a = std::max(worst_a, r.normalization);
        worst_b = std::max(worst_b, r.contact1);
        worst_c = std::max(worst_c, r.contact2);
        worst_d = std::max(worst_d, r.special);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", u1, u2,
                      r.normalization, r.contact1, r.contact2, r.special);
      }
      csv += buf;
    }

  const double tol = user ? 1e-6 : 1e-10;
  JsonValue j;
  j["surface"] = chart->name();
  j["grid"] = grid;
  j["model"] = legendrian ? "legendrian" : "para";
  bool pass;
  if (legendrian) {
    j["max_unit_norm_residual"] = worst_a;
    j["max_contact_residual"] = worst_b;
    pass = worst_a <= tol && worst_b <= tol;
  } else {
    j["max_normalization_residual"] = worst_a;
    j["max_contact1_residual"] = worst_b;
    j["max_contact2_residual"] = worst_c;
    j["max_special_residual"] = worst_d;
    pass = worst_a <= tol && worst_b <= tol && worst_c <= tol && worst_d <= tol;
  }
  j["tolerance"] = tol;
  j["pass"] = pass;

  std::printf("%s: %s (grid %dx%d, tol %.1e)\n", chart->name().c_str(),
              pass ? "PASS" : "FAIL", grid, grid, tol);
  if (!csv_path.empty()) {
    int rc = write_file(csv_path, csv);
    if (rc != kExitOk) return rc;
  }
  if (!json_path.empty()) {
    int rc = write_file(json_path, j.dump(2) + "\n");
    if (rc != kExitOk) return rc;
  }
  return pass ? kExitOk : kExitVerdictFail;
}

int cmd_verify(const std::string& space_arg, const std::string& surface_arg, int samples,
               double tol, unsigned seed, bool force_fd, const std::string& report_path,
               const std::string& grid_dump) {
  if (space_arg == "solv:sl3" || space_arg == "solv:sl4") {
    Model m = space_arg == "solv:sl3" ? Model::Sl3R : Model::Sl4R;
    SolvReport rep = run_solv_verification(m, nullptr, 20, seed);
    std::printf("verify %s: Einstein constant %.12f\n", space_arg.c_str(),
                rep.einstein_constant);
    print_verdicts(rep.verdicts);
    std::printf("%s\n", rep.all_pass() ? "PASS" : "FAIL");
    if (!report_path.empty()) {
      int rc = write_file(report_path, report_json(rep).dump(2) + "\n");
      if (rc != kExitOk) return rc;
    }
    return rep.all_pass() ? kExitOk : kExitVerdictFail;
  }

  if (space_arg != "su3so3" && space_arg != "sl3so3") {
    std::cerr << "error: unknown space '" << space_arg << "'\n";
    return kExitUsage;
  }
  bool user = false;
  auto surface = resolve_surface(surface_arg, &user);
  Space want = space_arg == "su3so3" ? Space::Su3So3 : Space::Sl3So3;
  if (surface->space() != want) {
    std::cerr << "error: surface '" << surface->name() << "' lives in "
              << space_name(surface->space()) << ", not " << space_arg << "\n";
    return kExitUsage;
  }

  DerivativeMode mode =
      (user || force_fd) ? DerivativeMode::FiniteDifference : DerivativeMode::Analytic;
  HypersurfaceChart chart = make_hypersurface(surface, mode);

  SamplingPlan plan;
  plan.samples = samples;
  plan.seed = seed;
  plan.einstein_tol = tol;
  if (const char* th = std::getenv("EINLAB_THREADS")) plan.threads = std::atoi(th);

  SurfaceReport rep = run_surface_verification(chart, plan);
  std::printf("verify %s / %s: %d samples accepted (%d rejected near singular loci)\n",
              space_arg.c_str(), rep.surface.c_str(), rep.accepted, rep.rejected);
  std::printf("  Einstein constant estimate %.9f\n", rep.einstein_constant_estimate);
  print_verdicts(rep.verdicts);
  std::printf("%s\n", rep.all_pass() ? "PASS" : "FAIL");

  if (!report_path.empty()) {
    int rc = write_file(report_path, report_json(rep).dump(2) + "\n");
    if (rc != kExitOk) return rc;
  }
  if (!grid_dump.empty()) {
    int rc = write_file(grid_dump, report_csv(rep));
    if (rc != kExitOk) return rc;
  }
  return rep.all_pass() ? kExitOk : kExitVerdictFail;
}

int cmd_probe(const std::string& surface_arg, double u1, double u2, double theta_max,
              const std::string& json_path) {
  bool user = false;
  auto surface = resolve_surface(surface_arg, &user);
  HypersurfaceChart chart = make_hypersurface(surface);

  JsonValue j;
  j["surface"] = surface->name();
  JsonValue upair;
  upair.push_back(u1);
  upair.push_back(u2);
  j["u"] = upair;

  bool pass;
  if (surface->name() == "rank1_plane") {
    ProbeResult r = no_drop_scan(chart, u1, u2, theta_max);
    std::printf("singular-probe %s at (%.3f, %.3f): no rank drops expected\n",
                surface->name().c_str(), u1, u2);
    std::printf("  min detector over |theta| <= %.1f scan: %.3e\n", theta_max,
                r.min_sigma_off_family);
    pass = r.min_sigma_off_family > 1e-3;
    j["mode"] = "no_drop";
    j["min_detector"] = r.min_sigma_off_family;
  } else {
    ProbeResult r = singular_locus_probe(chart, u1, u2, theta_max);
    std::printf("singular-probe %s at (%.3f, %.3f): predicted one-parameter family\n",
                surface->name().c_str(), u1, u2);
    std::printf("  detector along family (max): %.3e\n", r.max_sigma_on_family);
    std::printf("  transverse dip offset (max): %.3e\n", r.max_transverse_offset);
    pass = r.max_sigma_on_family < 1e-6 && r.max_transverse_offset < 1e-4;
    j["mode"] = "family";
    j["max_detector_on_family"] = r.max_sigma_on_family;
    j["max_transverse_offset"] = r.max_transverse_offset;
    JsonValue pts;
    for (size_t i = 0; i < r.thetas.size(); ++i) {
      JsonValue one;
      one["theta"] = r.thetas[i];
      one["t1"] = r.t_points[i][0];
      one["t2"] = r.t_points[i][1];
      pts.push_back(one);
    }
    j["family"] = pts;
  }
  j["pass"] = pass;
  std::printf("%s\n", pass ? "PASS" : "FAIL");
  if (!json_path.empty()) {
    int rc = write_file(json_path, j.dump(2) + "\n");
    if (rc != kExitOk) return rc;
  }
  return pass ? kExitOk : kExitVerdictFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"einlab: Einstein hypersurface constructions in rank-two symmetric spaces"};
  app.require_subcommand(1);

  std::string model_name, json_path;
  auto* roots = app.add_subcommand("roots", "restricted root data of a model algebra");
  roots->add_option("--model", model_name, "sl3 | sl4 | su3")->required();
  roots->add_option("--json", json_path, "write the root datum as JSON");

  std::string iw_model, iw_json, iw_xi;
  auto* iw = app.add_subcommand("iwasawa", "Iwasawa decomposition and Einstein certificate");
  iw->add_option("--model", iw_model, "sl3 | sl4")->required();
  iw->add_option("--xi", iw_xi, "comma-separated coordinates of xi in the abelian part");
  iw->add_option("--json", iw_json, "write the certificate as JSON");

  std::string sc_surface, sc_csv, sc_json;
  int sc_grid = 32;
  auto* sc = app.add_subcommand("surface-check", "surface residual sweep");
  sc->add_option("--surface,--spec", sc_surface, "built-in name or spec .json path")
      ->required();
  sc->add_option("--grid", sc_grid, "grid resolution per axis");
  sc->add_option("--csv", sc_csv, "per-point residual CSV path");
  sc->add_option("--json", sc_json, "aggregate verdict JSON path");

  std::string v_space, v_surface, v_report, v_dump;
  int v_samples = 256;
  double v_tol = 0.0;
  unsigned v_seed = 0;
  bool v_fd = false;
  auto* ver = app.add_subcommand("verify", "hypersurface verification battery");
  ver->add_option("--space", v_space, "su3so3 | sl3so3 | solv:sl3 | solv:sl4")->required();
  ver->add_option("--surface", v_surface, "built-in name or spec .json path");
  ver->add_option("--samples", v_samples, "number of quasi-random samples");
  ver->add_option("--tol", v_tol, "Einstein verdict tolerance (default per mode)");
  ver->add_option("--seed", v_seed, "sampling seed (recorded in the report)");
  ver->add_flag("--fd", v_fd, "force finite-difference chart derivatives");
  ver->add_option("--report", v_report, "verification report JSON path");
  ver->add_option("--grid-dump", v_dump, "per-sample CSV path");

  std::string p_surface, p_json;
  double p_u1 = 0.3, p_u2 = 0.4, p_theta = 2.6;
  auto* pr = app.add_subcommand("singular-probe", "rank-drop scan over a leaf");
  pr->add_option("--surface", p_surface, "built-in name or spec .json path")->required();
  pr->add_option("--u1", p_u1, "surface parameter u1");
  pr->add_option("--u2", p_u2, "surface parameter u2");
  pr->add_option("--theta-max", p_theta, "scan range of the family parameter");
  pr->add_option("--json", p_json, "probe result JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (roots->parsed()) return cmd_roots(model_name, json_path);
    if (iw->parsed()) return cmd_iwasawa(iw_model, iw_xi, iw_json);
    if (sc->parsed()) return cmd_surface_check(sc_surface, sc_grid, sc_csv, sc_json);
    if (ver->parsed()) {
      bool solv = v_space.rfind("solv:", 0) == 0;
      if (!solv && v_surface.empty()) {
        std::cerr << "error: --surface is required for su3so3/sl3so3 verification\n";
        return kExitUsage;
      }
      return cmd_verify(v_space, v_surface, v_samples, v_tol, v_seed, v_fd, v_report, v_dump);
    }
    if (pr->parsed()) return cmd_probe(p_surface, p_u1, p_u2, p_theta, p_json);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
