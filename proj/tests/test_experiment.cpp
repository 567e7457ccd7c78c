#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loopbraid/errors.hpp"
#include "loopbraid/experiment.hpp"

using namespace loopbraid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("loopbraid_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LOOPBRAID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kXxxConfig = R"(spec:
  ansatz: rational
  c_const: 1
n_sites: 3
u0: 0.5
checks: [ybe, hamiltonian, transfer-commute]
samples: 3
seed: 11
)";

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("parse_complex forms") {
  CHECK(parse_complex("1.5") == CScalar(1.5, 0));
  CHECK(parse_complex("-2") == CScalar(-2, 0));
  CHECK(parse_complex("0.5+0.25i") == CScalar(0.5, 0.25));
  CHECK(parse_complex("3-i") == CScalar(3, -1));
  CHECK(parse_complex("2i") == CScalar(0, 2));
  CHECK(parse_complex("1e-3-2e+1i") == CScalar(1e-3, -20));
  CHECK_THROWS_AS(parse_complex("abc", "spec.alpha"), ConfigError);
}

TEST_CASE("parse_polynomial and parse_b_choice") {
  CHECK(parse_polynomial("0,1") == SpectralPolynomial::linear(1.0));
  CHECK(std::holds_alternative<bchoice::ZZHalf>(parse_b_choice("zz-half")));
  CHECK(std::holds_alternative<bchoice::ProductProjector>(parse_b_choice("product:0,0,0.5")));
  CHECK_THROWS_AS(parse_b_choice("product:0,0,0"), ConfigError);
  CHECK_THROWS_AS(parse_b_choice("product:0,0"), ConfigError);
  CHECK_THROWS_AS(parse_b_choice("other"), ConfigError);
  CHECK_THROWS_AS(parse_b_choice("custom:/nonexistent/b.txt"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config_text(kXxxConfig);
  CHECK(cfg.spec.ansatz == Ansatz::Rational);
  CHECK(cfg.n_sites == 3);
  REQUIRE(cfg.u0.has_value());
  CHECK(*cfg.u0 == CScalar(0.5));
  CHECK(cfg.checks.size() == 3);
  CHECK(cfg.seed == 11);
  CHECK(default_u0(parse_config_text("checks: [hamiltonian]\nspec: {c_const: 2}\n")) == CScalar(1.0));
}

TEST_CASE("config errors name the field and line") {
  try {
    parse_config_text("checks: [ybe]\nspec:\n  ansatz: rational\n  bogus: 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("checks: [nope]\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("checks: [ybe]\nn_sites: 40\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("checks: [ybe]\nspec: {alpha: 'x+'}\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("checks: [ybe\n"), ConfigError);
}

TEST_CASE("invalid combinations are configuration errors") {
  std::ostringstream out, err;
  auto code = [&](const std::string& text) { return run_config(parse_config_text(text), std::nullopt, out, err); };
  CHECK(code("checks: [relations]\nspec: {ansatz: a2, alpha: -1}\nn_sites: 4\n") == kExitConfigError);
  CHECK(code("checks: [relations]\nn_sites: 3\n") == kExitConfigError);
  CHECK(code("checks: [abcd]\nspec: {ansatz: a2}\n") == kExitConfigError);
  CHECK(code("checks: [hamiltonian]\nn_sites: 1\n") == kExitConfigError);
}

TEST_CASE("run_experiment report layout") {
  const auto res = run_experiment(parse_config_text(kXxxConfig));
  CHECK(res.exit_code == kExitOk);
  const auto& r = res.report;
  CHECK(r["schema_version"] == kSchemaVersion);
  CHECK(r.contains("config"));
  CHECK(r["seed"] == 11);
  REQUIRE(r["checks"].is_array());
  bool saw_xxx = false;
  for (const auto& e : r["checks"]) {
    CHECK(e.contains("convention"));
    CHECK(e.contains("status"));
    if (e["name"] == "hamiltonian:closed-form:xxx") {
      saw_xxx = true;
      CHECK(e["status"] == "pass");
      CHECK(e["residual"].get<double>() <= 1e-12);
    }
  }
  CHECK(saw_xxx);
  CHECK(r["hamiltonian"]["closed_form"] == "xxx");
  CHECK(r.items().begin().key() == "schema_version");
  CHECK(std::prev(r.end()).key() == "timings");
}

TEST_CASE("failing asserted check gives exit code 2") {
  const auto cfg = parse_config_text("checks: [ybe]\nspec: {ansatz: a3, alpha: 0.7, b_poly: [0, -0.7]}\n");
  CHECK(run_experiment(cfg).exit_code == kExitCheckFailed);
}

TEST_CASE("relations classification in the report") {
  const auto res = run_experiment(parse_config_text("checks: [relations]\nspec: {alpha: 0.6}\nn_sites: 4\n"));
  CHECK(res.exit_code == kExitOk);
  CHECK(res.report["classification"]["group"] == "SLB");
  const auto sweep =
      run_experiment(parse_config_text("checks: [relations]\nn_sites: 4\nsweep: {alpha: [0.1, 0.5]}\n"));
  CHECK(sweep.report["classification"].is_array());
  CHECK(sweep.report["classification"].size() == 2);
}

TEST_CASE("identical config and seed give identical reports") {
  const char* text = R"(spec: {ansatz: a2, alpha: 0.3+0.2i, b_choice: "product:0.3,0,0.4"}
n_sites: 3
checks: [ybe, rtt, transfer-commute, charges, hamiltonian, diagnostic]
samples: 4
seed: 1234
)";
  const auto a = run_experiment(parse_config_text(text));
  const auto b = run_experiment(parse_config_text(text));
  CHECK(report_without_timings(a.report) == report_without_timings(b.report));
  const auto c = run_experiment(parse_config_text(std::string(text) + "sweep: {random_pairs: 4}\n"));
  CHECK(report_without_timings(a.report) != report_without_timings(c.report));
}

TEST_CASE("run writes report and spectrum files") {
  const auto dir = scratch("run");
  const auto cfg = write_file(dir / "cfg.yaml", "checks: [spectrum]\nn_sites: 8\nspec: {c_const: 1}\n");
  std::ostringstream out, err;
  CHECK(run(cfg, dir / "out", out, err) == kExitOk);
  const auto csv = read_file(dir / "out" / "spectrum.csv");
  CHECK(csv.rfind("index,re,im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 257);
  const auto report = nlohmann::json::parse(read_file(dir / "out" / "report.json"));
  CHECK(report.contains("timings"));
  CHECK_FALSE(fs::exists(dir / "out" / "report.json.tmp"));
  CHECK(run(dir / "missing.yaml", dir / "out", out, err) == kExitConfigError);
}

TEST_CASE("custom B files resolve relative to the config") {
  const auto dir = scratch("custom");
  write_file(dir / "b.txt", "1 0 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 1\n");
  write_file(dir / "bad.txt", "0 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 0\n");
  const auto good = parse_config_file(write_file(dir / "g.yaml", "checks: [ybe]\nspec: {ansatz: a2, b_choice: 'custom:b.txt'}\n"));
  CHECK(run_experiment(good).exit_code == kExitOk);
  const auto bad = parse_config_file(write_file(dir / "x.yaml", "checks: [ybe]\nspec: {ansatz: a2, b_choice: 'custom:bad.txt'}\n"));
  std::ostringstream out, err;
  CHECK(run_config(bad, std::nullopt, out, err) == kExitConfigError);
  CHECK(err.str().find("swap invariance") != std::string::npos);
}

TEST_CASE("command-line tool exit codes") {
  const auto dir = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("verify-relations --alpha 0.6") == 0);
  CHECK(run_cli("check-ybe --ansatz rational --c-const 1") == 0);
  CHECK(run_cli("check-ybe --ansatz a3 --alpha 0.7 --b-poly 0,-0.35") == 2);
  CHECK(run_cli("verify-relations --alpha -1") == 3);
  CHECK(run_cli("--bogus") == 3);
  CHECK(run_cli("build-hamiltonian --ansatz rational --c-const 1 --u0 0.5 --n-sites 4 --out " +
                (dir / "h").string()) == 0);
  CHECK(fs::exists(dir / "h" / "report.json"));
  const auto cfg = write_file(dir / "c.yaml", kXxxConfig);
  CHECK(run_cli("run " + cfg.string() + " --out " + (dir / "r").string()) == 0);
  CHECK(run_cli("run " + (dir / "absent.yaml").string()) == 3);
}

TEST_CASE("command-line spectrum output") {
  const auto dir = scratch("cli_spectrum");
  CHECK(run_cli("spectrum --n-sites 8 --out " + dir.string()) == 0);
  const auto csv = read_file(dir / "spectrum.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 257);
}

}  // TEST_SUITE
