// Integration tests of the command-line tool: exit-code contract, artifact
// files, and byte determinism for a fixed seed.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#ifndef EINLAB_CLI_PATH
#define EINLAB_CLI_PATH "einlab"
#endif
#ifndef EINLAB_TMP_DIR
#define EINLAB_TMP_DIR "."
#endif

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(EINLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string tmp_path(const std::string& name) {
  return std::string(EINLAB_TMP_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace

TEST_CASE("exit codes: pass, verdict failure, usage, io, spec") {
  CHECK(run("verify --space su3so3 --surface legendrian_torus --samples 32") == 0);
  CHECK(run("verify --space sl3so3 --surface rank1_plane --samples 32") == 0);
  CHECK(run("verify --space solv:sl4 --seed 3") == 0);
  CHECK(run("iwasawa --model sl3") == 0);
  CHECK(run("roots --model su3") == 0);

  // the control is minimal but not Einstein: verdict failure
  CHECK(run("verify --space su3so3 --surface torus_beta0_control --samples 32") == 1);

  // usage errors: unknown names, space mismatch, compact Iwasawa
  CHECK(run("verify --space su3so3 --surface no_such_surface --samples 8") == 2);
  CHECK(run("verify --space su3so3 --surface hyperboloid --samples 8") == 2);
  CHECK(run("verify --space nowhere --surface legendrian_torus") == 2);
  CHECK(run("iwasawa --model su3") == 2);
  CHECK(run("bogus-subcommand") == 2);

  // unwritable output path
  CHECK(run("verify --space su3so3 --surface legendrian_torus --samples 8 "
            "--report /nonexistent_dir/report.json") == 3);

  // malformed spec file
  write_file(tmp_path("bad_spec.json"), "{\"model\": \"bogus\"");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("bad_spec.json")) == 4);
  write_file(tmp_path("bad_model.json"),
             "{\"model\": \"bogus\", \"expressions\": [], \"domain\": [[0,1],[0,1]]}");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("bad_model.json")) == 4);
}

TEST_CASE("report artifacts: parseable, deterministic, row counts") {
  std::string rep1 = tmp_path("rep1.json"), rep2 = tmp_path("rep2.json");
  std::string csv = tmp_path("dump.csv");
  std::string base = "verify --space sl3so3 --surface hyperboloid --samples 48 --seed 5 ";
  REQUIRE(run(base + "--report " + rep1 + " --grid-dump " + csv) == 0);
  REQUIRE(run(base + "--report " + rep2) == 0);

  std::string a = slurp(rep1), b = slurp(rep2);
  REQUIRE_FALSE(a.empty());
  CHECK(a == b);  // identical seeds give byte-identical reports

  nlohmann::json parsed = nlohmann::json::parse(a);
  CHECK(parsed.at("surface").get<std::string>() == "hyperboloid");
  CHECK(parsed.at("all_pass").get<bool>());
  CHECK(parsed.at("seed").get<double>() == 5.0);
  int accepted = parsed.at("samples_accepted").get<int>();

  std::string dump = slurp(csv);
  int rows = -1;  // header line
  for (char c : dump)
    if (c == '\n') ++rows;
  CHECK(rows == accepted);

  // a different seed produces a different report
  std::string rep3 = tmp_path("rep3.json");
  REQUIRE(run("verify --space sl3so3 --surface hyperboloid --samples 48 --seed 6 "
              "--report " + rep3) == 0);
  CHECK(slurp(rep3) != a);
}

TEST_CASE("surface-check and roots artifacts") {
  std::string csv = tmp_path("leg.csv"), json = tmp_path("leg.json");
  REQUIRE(run("surface-check --surface legendrian_torus --grid 16 --csv " + csv +
              " --json " + json) == 0);
  nlohmann::json parsed = nlohmann::json::parse(slurp(json));
  CHECK(parsed.at("pass").get<bool>());
  CHECK(parsed.at("max_contact_residual").get<double>() < 1e-10);
  int lines = 0;
  for (char c : slurp(csv))
    if (c == '\n') ++lines;
  CHECK(lines == 16 * 16 + 1);

  std::string rj = tmp_path("roots.json");
  REQUIRE(run("roots --model sl4 --json " + rj) == 0);
  nlohmann::json roots = nlohmann::json::parse(slurp(rj));
  CHECK(roots.at("positive_roots").size() == 6);
  CHECK(roots.at("dimension_audit").at("consistent").get<bool>());
}

TEST_CASE("user surface specs run end to end") {
  write_file(tmp_path("user_surface.json"), R"json({
    "model": "affine",
    "name": "user_hyperboloid",
    "expressions": ["cosh(u2)*cos(u1)", "cosh(u2)*sin(u1)", "sinh(u2)"],
    "domain": [[-1.2, 1.2], [-1.0, 1.0]]
  })json");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("user_surface.json") +
            " --samples 48") == 0);
  CHECK(run("surface-check --spec " + tmp_path("user_surface.json") + " --grid 12") == 0);

  // a round sphere is a valid chart but not special: surface-check fails
  write_file(tmp_path("round_sphere.json"), R"json({
    "model": "affine",
    "name": "round_sphere",
    "expressions": ["cos(u1)*cos(u2)", "sin(u1)*cos(u2)", "sin(u2)"],
    "domain": [[0.1, 1.0], [0.1, 1.0]]
  })json");
  CHECK(run("surface-check --spec " + tmp_path("round_sphere.json") + " --grid 8") == 1);

  // flat torus as a user legendrian spec
  write_file(tmp_path("user_torus.json"), R"json({
    "model": "legendrian",
    "name": "user_torus",
    "expressions": ["-sin(u1)/sqrt(3)", "cos(u1)/sqrt(3)",
                    "-sin(u2)/sqrt(3)", "cos(u2)/sqrt(3)",
                    "sin(u1+u2)/sqrt(3)", "cos(u1+u2)/sqrt(3)"],
    "domain": [[0.2, 1.6], [0.3, 1.7]]
  })json");
  CHECK(run("surface-check --spec " + tmp_path("user_torus.json") + " --grid 10") == 0);
  CHECK(run("verify --space su3so3 --surface " + tmp_path("user_torus.json") +
            " --samples 48") == 0);

  // hyperboloid pair as a user para spec
  write_file(tmp_path("user_pair.json"), R"json({
    "model": "para",
    "name": "user_pair",
    "expressions": ["cosh(u2)*cos(u1)", "cosh(u2)*sin(u1)", "sinh(u2)",
                    "cosh(u2)*cos(u1)", "cosh(u2)*sin(u1)", "-sinh(u2)"],
    "domain": [[-1.2, 1.2], [-1.0, 1.0]]
  })json");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("user_pair.json") +
            " --samples 48") == 0);

  // normalized curve as a user ruled spec
  write_file(tmp_path("user_ruled.json"), R"json({
    "model": "ruled",
    "name": "user_ruled",
    "expressions": ["1", "s", "s^2/2"],
    "domain": [[-0.5, 0.5], [-0.5, 0.5]]
  })json");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("user_ruled.json") +
            " --samples 48") == 0);

  // a curve violating the unit-determinant normalization is rejected
  write_file(tmp_path("bad_ruled.json"), R"json({
    "model": "ruled",
    "name": "bad_ruled",
    "expressions": ["2*cos(s)", "2*sin(s)", "2"],
    "domain": [[-0.5, 0.5], [-0.5, 0.5]]
  })json");
  CHECK(run("verify --space sl3so3 --surface " + tmp_path("bad_ruled.json")) == 4);
}

TEST_CASE("singular probe subcommand") {
  std::string pj = tmp_path("probe.json");
  CHECK(run("singular-probe --surface legendrian_torus --u1 0.7 --u2 1.3 --json " + pj) == 0);
  nlohmann::json parsed = nlohmann::json::parse(slurp(pj));
  CHECK(parsed.at("pass").get<bool>());
  CHECK(parsed.at("max_transverse_offset").get<double>() < 1e-4);
  CHECK(run("singular-probe --surface rank1_plane --theta-max 5") == 0);
}
