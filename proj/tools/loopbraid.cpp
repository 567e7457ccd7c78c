// loopbraid: command-line front end for the loop braid / spin chain toolkit.
//
//   loopbraid run config.yaml --out results/
//   loopbraid verify-relations --n-sites 4 --alpha 0.6 --b-choice zz-half
//   loopbraid build-hamiltonian --ansatz rational --c-const 1 --u0 0.5 --n-sites 3
//   loopbraid spectrum --ansatz a3 --alpha 0.5 --u0 0 --n-sites 8 > spectrum.csv

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loopbraid/errors.hpp"
#include "loopbraid/experiment.hpp"

namespace lb = loopbraid;

namespace {

struct CommonFlags {
  int n_sites = 3;
  std::string alpha = "0.5";
  std::string b_choice = "zz-half";
  std::string ansatz;
  std::string a_poly;
  std::string b_poly;
  std::string c_const = "1";
  std::string u0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  int samples = 5;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_ansatz, int default_n) {
  f.ansatz = default_ansatz;
  f.n_sites = default_n;
  cmd->add_option("--n-sites", f.n_sites, "number of chain sites N")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "deformation parameter alpha (re or re+im i)")->capture_default_str();
  cmd->add_option("--b-choice", f.b_choice, "zz-half | product:l,m,n | custom:file")->capture_default_str();
  cmd->add_option("--ansatz", f.ansatz, "a1 | a2 | a3 | rational")->capture_default_str();
  cmd->add_option("--a-poly", f.a_poly, "a(u) coefficients, low order first, e.g. 0,1");
  cmd->add_option("--b-poly", f.b_poly, "b(u) coefficients (a3 only)");
  cmd->add_option("--c-const", f.c_const, "rational R constant c")->capture_default_str();
  cmd->add_option("--u0", f.u0, "expansion point (default c/2 for rational, 0 otherwise)");
  cmd->add_option("--tol", f.tol, "tolerance override for the check");
  cmd->add_option("--seed", f.seed, "64-bit seed for random sweeps")->capture_default_str();
  cmd->add_option("--samples", f.samples, "random sample count")->capture_default_str();
  cmd->add_option("--out", f.out, "output directory for report.json / spectrum.csv");
}

lb::ExperimentConfig to_config(const CommonFlags& f, lb::CheckKind check) {
  lb::ExperimentConfig cfg;
  cfg.n_sites = f.n_sites;
  if (cfg.n_sites < 1 || cfg.n_sites > 13) throw lb::ConfigError("--n-sites: must be between 1 and 13", "--n-sites");
  cfg.spec.alpha = lb::parse_complex(f.alpha, "--alpha");
  cfg.spec.b_choice_text = f.b_choice;
  cfg.spec.b_choice = lb::parse_b_choice(f.b_choice, "--b-choice", std::filesystem::current_path());
  if (f.ansatz == "a1") cfg.spec.ansatz = lb::Ansatz::A1;
  else if (f.ansatz == "a2") cfg.spec.ansatz = lb::Ansatz::A2;
  else if (f.ansatz == "a3") cfg.spec.ansatz = lb::Ansatz::A3;
  else if (f.ansatz == "rational") cfg.spec.ansatz = lb::Ansatz::Rational;
  else throw lb::ConfigError("--ansatz: unknown ansatz '" + f.ansatz + "'", "--ansatz");
  if (!f.a_poly.empty()) cfg.spec.a_poly = lb::parse_polynomial(f.a_poly, "--a-poly");
  if (!f.b_poly.empty()) cfg.spec.b_poly = lb::parse_polynomial(f.b_poly, "--b-poly");
  cfg.spec.c_const = lb::parse_complex(f.c_const, "--c-const");
  if (!f.u0.empty()) cfg.u0 = lb::parse_complex(f.u0, "--u0");
  if (f.tol < 0.0) throw lb::ConfigError("--tol: must be positive", "--tol");
  if (f.tol > 0.0) cfg.tolerances[std::string(lb::to_string(check))] = f.tol;
  if (f.samples < 0) throw lb::ConfigError("--samples: must be >= 0", "--samples");
  cfg.samples = f.samples;
  cfg.seed = f.seed;
  cfg.checks = {check};
  return cfg;
}

// Without --out the spectrum subcommand streams the CSV to stdout.
int run_spectrum_to_stdout(const lb::ExperimentConfig& cfg) {
  try {
    const auto result = lb::run_experiment(cfg);
    for (const auto& line : result.summary) std::cerr << line << "\n";
    if (result.spectrum) std::cout << lb::spectrum_csv(*result.spectrum);
    return result.exit_code;
  } catch (const lb::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return lb::kExitNumericalError;
  } catch (const lb::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return lb::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"loopbraid: loop braid representations, R-matrices and spin chain Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path;
  std::string run_out = "loopbraid-out";
  auto* run = app.add_subcommand("run", "run every check listed in a YAML config");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--out", run_out, "output directory")->capture_default_str();

  struct Sub {
    const char* name;
    const char* help;
    lb::CheckKind check;
    const char* ansatz;
    int n_sites = 3;
  };
  const Sub subs[] = {
      {"verify-relations", "check the ten loop braid relations and classify", lb::CheckKind::Relations, "rational", 4},
      {"check-ybe", "Yang-Baxter residuals in all three conventions", lb::CheckKind::Ybe, "rational"},
      {"build-hamiltonian", "derive the local Hamiltonian and compare with closed forms",
       lb::CheckKind::Hamiltonian, "rational"},
      {"transfer-commute", "commutators of transfer matrices at random (u, v)", lb::CheckKind::TransferCommute,
       "rational"},
      {"charges", "extract conserved charges and check mutual commutation", lb::CheckKind::Charges, "rational"},
      {"spectrum", "eigenvalues of the local Hamiltonian as CSV", lb::CheckKind::Spectrum, "rational"},
      {"diagnose", "commutators of derived and closed-form Hamiltonians with T(v)", lb::CheckKind::Diagnostic,
       "rational"},
  };
  std::vector<CommonFlags> flags(std::size(subs));
  std::vector<CLI::App*> cmds;
  for (std::size_t k = 0; k < std::size(subs); ++k) {
    auto* cmd = app.add_subcommand(subs[k].name, subs[k].help);
    add_common(cmd, flags[k], subs[k].ansatz, subs[k].n_sites);
    cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return lb::kExitConfigError;
  }

  if (run->parsed()) return lb::run(config_path, run_out, std::cout, std::cerr);

  for (std::size_t k = 0; k < cmds.size(); ++k) {
    if (!cmds[k]->parsed()) continue;
    lb::ExperimentConfig cfg;
    try {
      cfg = to_config(flags[k], subs[k].check);
    } catch (const lb::Error& e) {
      std::cerr << "configuration error: " << e.what() << "\n";
      return lb::kExitConfigError;
    }
    if (subs[k].check == lb::CheckKind::Spectrum && flags[k].out.empty()) return run_spectrum_to_stdout(cfg);
    std::optional<std::filesystem::path> out;
    if (!flags[k].out.empty()) out = flags[k].out;
    return lb::run_config(cfg, out, std::cout, std::cerr);
  }
  return lb::kExitConfigError;
}
