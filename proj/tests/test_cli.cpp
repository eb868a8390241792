// End-to-end tests for the command-line tool: exit codes, report structure,
// determinism across runs and worker counts, config-file handling, and the
// JSON serialization helpers used by the tool's input/output formats.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "intgeo/forms.hpp"
#include "intgeo/grassmann.hpp"
#include "intgeo/polytope.hpp"
#include "intgeo/serialization.hpp"
#include "intgeo/valuations.hpp"

namespace {

namespace fs = std::filesystem;
using intgeo::ordered_json;

#ifndef INTGEO_CLI_PATH
#error "INTGEO_CLI_PATH must point at the built command-line binary"
#endif

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("intgeo_cli_tests_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path scratch_file(const std::string& stem) {
  static int counter = 0;
  return scratch_dir() / (stem + "_" + std::to_string(counter++));
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  fs::path out = scratch_file("out");
  std::string cmd = std::string(INTGEO_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return CliResult{WEXITSTATUS(rc), ss.str()};
}

ordered_json parse_report(const CliResult& r) {
  ordered_json j = ordered_json::parse(r.output);
  REQUIRE(j.contains("header"));
  REQUIRE(j["header"].contains("timestamp"));
  REQUIRE(j.contains("command"));
  REQUIRE(j.contains("config"));
  REQUIRE(j.contains("results"));
  REQUIRE(j.contains("pass"));
  return j;
}

// Reports are byte-identical for equal configs except for the wall-clock
// timestamp, which lives in one isolated header field.
std::string canonical(ordered_json j) {
  j["header"].erase("timestamp");
  return j.dump(2);
}

double row_value(const ordered_json& report, const std::string& valuation) {
  for (const auto& row : report["results"]) {
    if (row["valuation"] == valuation) return row["value"].get<double>();
  }
  FAIL("valuation row not found: " + valuation);
  return 0.0;
}

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("check-identities --help").exit_code == 0);
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_cli("").exit_code == 2);                         // missing subcommand
  CHECK(run_cli("frobnicate").exit_code == 2);               // unknown subcommand
  CHECK(run_cli("check-identities").exit_code == 2);         // missing --context
  CHECK(run_cli("check-identities --context Q8").exit_code == 2);
  CHECK(run_cli("evaluate --preset no-such-body").exit_code == 2);
  CHECK(run_cli("evaluate --family cube --dim 7 --side 1 --valuations nu_9").exit_code == 2);
  CHECK(run_cli("pkf --preset so7-cubes --group so").exit_code == 2);
  CHECK(run_cli("evaluate --family box --dim 7 --axes e9 --half-lengths 1 "
                "--valuations mu_1")
            .exit_code == 2);
}

TEST_CASE("configuration errors do not emit a partial report") {
  CliResult r = run_cli("check-identities");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("\"results\"") == std::string::npos);
}

TEST_CASE("identity checks pass and report one row per check") {
  CliResult r = run_cli("check-identities --context SO --samples 300 --seed 3");
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_report(r);
  CHECK(j["command"] == "check-identities");
  CHECK(j["pass"].get<bool>());
  for (const auto& row : j["results"]) {
    CHECK(row.contains("check"));
    CHECK(row.contains("value"));
    CHECK(row.contains("threshold"));
    CHECK(row.contains("comparison"));
    CHECK(row["pass"].get<bool>());
  }
}

TEST_CASE("an unachievable tolerance makes checks fail with exit code 1") {
  CliResult r = run_cli("check-identities --context G2 --samples 40 --tol 1e-30 --seed 3");
  CHECK(r.exit_code == 1);
  ordered_json j = parse_report(r);
  CHECK_FALSE(j["pass"].get<bool>());
}

TEST_CASE("an impossible certification tolerance exits with the certification code") {
  CliResult r = run_cli("sample-diagnostics --context G2 --samples 5 --certify-tol 1e-18");
  CHECK(r.exit_code == 3);
}

TEST_CASE("reports are byte-identical for the same seed, modulo the timestamp") {
  const std::string args = "evaluate --preset real-4-plane-box --seed 11";
  CliResult a = run_cli(args);
  CliResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(canonical(parse_report(a)) == canonical(parse_report(b)));
}

TEST_CASE("worker count does not change numerical results") {
  const std::string base =
      "pkf --group so3 --k-family cube --k-dim 3 --k-side 1 --l-family cube --l-dim 3 "
      "--l-side 1 --samples 64 --translations 16 --blocks 8 --seed 4";
  CliResult a = run_cli(base + " --workers 1");
  CliResult b = run_cli(base + " --workers 3");
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  ordered_json ja = parse_report(a);
  ordered_json jb = parse_report(b);
  ja["config"].erase("workers");
  jb["config"].erase("workers");
  CHECK(canonical(std::move(ja)) == canonical(std::move(jb)));
}

TEST_CASE("evaluate reproduces the closed-form values on the flat 4-plane box") {
  CliResult r = run_cli("evaluate --preset real-4-plane-box --seed 1");
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_report(r);
  CHECK(row_value(j, "mu_4") == Catch::Approx(1.0).margin(1e-9));
  CHECK(row_value(j, "eta") == Catch::Approx(1.0).margin(1e-9));
  CHECK(row_value(j, "eta_prime") == Catch::Approx(4.0).margin(1e-9));
  CHECK(row_value(j, "tasaki_4_0") == Catch::Approx(1.0).margin(1e-9));
  CHECK(row_value(j, "tasaki_4_1") == Catch::Approx(0.0).margin(1e-9));
  CHECK(row_value(j, "tasaki_4_2") == Catch::Approx(0.0).margin(1e-9));
  CHECK(row_value(j, "su_phi_1") == Catch::Approx(0.0).margin(1e-9));
  CHECK(row_value(j, "su_phi_2") == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("evaluate flags the plane with negative renormalized weight") {
  CliResult r = run_cli("evaluate --preset negative-witness-box --seed 1");
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_report(r);
  CHECK(row_value(j, "nu_4_prime") == Catch::Approx(-1.0).margin(1e-9));
  CHECK(row_value(j, "mu_4") == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("rank check reports a ten-dimensional invariant space") {
  for (std::string ctx : {"G2", "SPIN7"}) {
    CliResult r = run_cli("rank-check --context " + ctx + " --samples 150 --seed 5");
    REQUIRE(r.exit_code == 0);
    ordered_json j = parse_report(r);
    CHECK(j["results"]["total"].get<int>() == 10);
    CHECK(j["results"]["expected"].get<int>() == 10);
    CHECK(j["results"]["per_degree"].size() >= 8);
    CHECK(j["pass"].get<bool>());
  }
}

TEST_CASE("csv output uses the documented column layout") {
  CliResult r = run_cli("check-identities --context SO --samples 120 --format csv --seed 2");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("check,samples,value,threshold,comparison,pass", 0) == 0);

  CliResult e = run_cli("evaluate --preset associative-box --format csv --seed 2");
  REQUIRE(e.exit_code == 0);
  CHECK(e.output.rfind("valuation,polytope,value,std_error", 0) == 0);
}

TEST_CASE("--output writes the report to a file") {
  fs::path out = scratch_file("report");
  CliResult r = run_cli("evaluate --preset associative-box --seed 1 --output " + out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  REQUIRE(in.good());
  ordered_json j;
  in >> j;
  CHECK(j["command"] == "evaluate");
}

TEST_CASE("a config file drives a complete run") {
  fs::path cfg = scratch_file("config");
  {
    std::ofstream f(cfg);
    f << "seed=9\nformat=json\n\n[evaluate]\npreset=real-4-plane-box\n";
  }
  CliResult r = run_cli("evaluate --config " + cfg.string());
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_report(r);
  CHECK(j["config"]["seed"].get<int>() == 9);
  CHECK(row_value(j, "eta") == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("unknown config keys are rejected") {
  fs::path cfg = scratch_file("config");
  {
    std::ofstream f(cfg);
    f << "[evaluate]\npreset=associative-box\nbogus_key=1\n";
  }
  CHECK(run_cli("evaluate --config " + cfg.string()).exit_code == 2);
}

TEST_CASE("the shipped example config parses and validates") {
  fs::path example = fs::path(INTGEO_SOURCE_DIR) / "docs" / "example-config.ini";
  REQUIRE(fs::exists(example));
  CliResult r = run_cli("evaluate --config " + example.string());
  CHECK(r.exit_code == 0);
  CliResult c = run_cli("check-identities --config " + example.string() + " --samples 200");
  CHECK(c.exit_code == 0);
}

TEST_CASE("pkf reports block means and a z-score") {
  CliResult r = run_cli(
      "pkf --group so2 --k-family cube --k-dim 2 --k-side 1 --l-family cube --l-dim 2 "
      "--l-side 1 --samples 128 --translations 32 --blocks 8 --seed 6");
  REQUIRE(r.exit_code == 0);
  ordered_json j = parse_report(r);
  const auto& res = j["results"];
  CHECK(res["lhs"]["block_means"].size() == 8);
  CHECK(res["lhs"]["std_error"].get<double>() > 0.0);
  CHECK(res["rhs"]["total"].get<double>() > 0.0);
  CHECK(std::abs(res["z_score"].get<double>()) < 6.0);
  CHECK(res["rhs"]["exceptional"].get<double>() == 0.0);
}

TEST_CASE("alternating forms round-trip through json") {
  for (const intgeo::AlternatingForm& f :
       {intgeo::associative_form(), intgeo::cayley_form(), intgeo::kaehler_form(3)}) {
    ordered_json j = intgeo::form_to_json(f);
    intgeo::AlternatingForm back = intgeo::form_from_json(j);
    REQUIRE(back.dim() == f.dim());
    REQUIRE(back.degree() == f.degree());
    for (int t = 0; t < f.terms(); ++t) CHECK(back.raw(t) == f.raw(t));
    CHECK(j["dim"].get<int>() == f.dim());
    CHECK(j["degree"].get<int>() == f.degree());
  }
}

TEST_CASE("subspaces round-trip through json with a row-major frame") {
  std::mt19937_64 rng(42);
  intgeo::Subspace w = intgeo::random_subspace(7, 3, rng);
  ordered_json j = intgeo::subspace_to_json(w);
  CHECK(j["n"].get<int>() == 7);
  CHECK(j["k"].get<int>() == 3);
  intgeo::Subspace back = intgeo::subspace_from_json(j);
  CHECK((back.frame() - w.frame()).cwiseAbs().maxCoeff() < 1e-15);
  // Row-major layout: the second stored entry is frame(0, 1).
  CHECK(j["frame"][1].get<double>() == Catch::Approx(w.frame()(0, 1)));
}

TEST_CASE("polytopes round-trip through json") {
  std::mt19937_64 rng(7);
  Eigen::VectorXd probe(4);
  probe << 0.3, -1.2, 0.5, 2.0;

  auto roundtrips = [](const intgeo::Polytope& p) {
    ordered_json j = intgeo::polytope_to_json(p);
    intgeo::Polytope back = intgeo::polytope_from_json(j);
    CHECK(intgeo::polytope_to_json(back) == j);
    CHECK(intgeo::distance(back, p) == Catch::Approx(0.0).margin(1e-12));
  };

  roundtrips(intgeo::Polytope::cube(4, 1.5));
  roundtrips(intgeo::Polytope::box(Eigen::VectorXd::Random(7),
                                   intgeo::random_subspace(7, 3, rng).frame(),
                                   Eigen::VectorXd::Constant(3, 0.8)));
  roundtrips(intgeo::Polytope::simplex(Eigen::MatrixXd::Random(4, 5)));

  // product with a nontrivial isometry applied on top
  intgeo::Polytope prod = intgeo::Polytope::product(intgeo::Polytope::cube(2, 1.0),
                                                    intgeo::Polytope::cube(2, 0.5));
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(4, 4);
  q(0, 0) = q(1, 1) = std::cos(0.3);
  q(0, 1) = -std::sin(0.3);
  q(1, 0) = std::sin(0.3);
  roundtrips(prod.transformed(q, probe));
}

TEST_CASE("valuation names parse and print consistently") {
  for (std::string name : {"mu_0", "mu_4", "nu_3", "nu_4", "eta", "nu_3_prime", "nu_4_prime",
                           "eta_prime", "tasaki_4_0", "tasaki_4_2", "su_phi_1", "su_phi_2"}) {
    CHECK(intgeo::valuation_from_name(name).name() == name);
  }
  CHECK_THROWS_AS(intgeo::valuation_from_name("nu_5"), std::invalid_argument);
  CHECK_THROWS_AS(intgeo::valuation_from_name("mu_x"), std::invalid_argument);
  CHECK_THROWS_AS(intgeo::valuation_from_name("mu_3_prime"), std::invalid_argument);
  CHECK_THROWS_AS(intgeo::valuation_from_name(""), std::invalid_argument);
  CHECK_THROWS_AS(intgeo::valuation_from_name("tasaki_4"), std::invalid_argument);
}
