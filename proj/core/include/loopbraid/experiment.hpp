#pragma once

// Experiment configuration, execution and report serialisation behind the
// command-line tool.
//
// Exit codes: 0 all asserted checks pass, 2 an asserted check failed,
// 3 configuration error, 4 numerical error.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loopbraid/chain.hpp"

namespace loopbraid {

enum class CheckKind { Relations, Ybe, Rtt, Abcd, TransferCommute, Charges, Hamiltonian, Spectrum, Diagnostic };

std::string_view to_string(CheckKind k);
/// ConfigError on unknown names.
CheckKind parse_check_kind(const std::string& name);

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 2;
inline constexpr int kExitConfigError = 3;
inline constexpr int kExitNumericalError = 4;

inline constexpr int kSchemaVersion = 1;

struct SpecConfig {
  Ansatz ansatz = Ansatz::Rational;
  CScalar alpha{0.5, 0.0};
  std::string b_choice_text = "zz-half";
  BChoice b_choice = bchoice::ZZHalf{};
  std::optional<SpectralPolynomial> a_poly;  // default: u for A1/A2, alpha u for A3
  std::optional<SpectralPolynomial> b_poly;  // default: -2 alpha u
  CScalar c_const{1.0, 0.0};
};

struct SweepConfig {
  std::vector<CScalar> u;
  std::vector<CScalar> v;
  std::vector<CScalar> alpha;
  int random_pairs = -1;  // -1: use `samples` when no explicit points are given
  double radius = 1.0;
};

struct ExperimentConfig {
  SpecConfig spec;
  int n_sites = 3;
  std::optional<CScalar> u0;  // default: c/2 for rational, 0 otherwise
  std::vector<CheckKind> checks;
  std::map<std::string, double> tolerances;
  SweepConfig sweep;
  int samples = 5;
  std::uint64_t seed = 0;
};

/// "1.5", "-2", "0.5+0.25i", "3-i", "2i".  ConfigError naming `field`.
CScalar parse_complex(const std::string& text, const std::string& field = "value");
/// Comma-separated coefficients, low order first: "0,1" is u.
SpectralPolynomial parse_polynomial(const std::string& text, const std::string& field = "polynomial");
/// "zz-half", "product:l,m,n" or "custom:<path to 4x4 matrix file>".  A
/// relative custom path is resolved against base_dir.
BChoice parse_b_choice(const std::string& text, const std::string& field = "b_choice",
                       const std::filesystem::path& base_dir = {});

ExperimentConfig parse_config_text(const std::string& text, const std::string& source = "<config>",
                                   const std::filesystem::path& base_dir = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Realises the R-matrix spec with the given alpha.  ConfigError on invalid
/// combinations (e.g. a B-choice failing its axioms).
RMatrixSpec make_spec(const SpecConfig& spec, CScalar alpha);

CScalar default_u0(const ExperimentConfig& config);
double tolerance_for(const ExperimentConfig& config, CheckKind kind);

nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

struct RunResult {
  nlohmann::ordered_json report;  // includes "timings" as the last key
  std::optional<Spectrum> spectrum;
  int exit_code = kExitOk;
  std::vector<std::string> summary;  // one human-readable line per entry
};

/// Executes every configured check.  Never throws for check failures; a
/// ConfigError or numerical error propagates to the caller.
RunResult run_experiment(const ExperimentConfig& config);

/// header `index,re,im`, eigenvalues in tensor_core order.
std::string spectrum_csv(const Spectrum& s);

/// Report without its timings block, for determinism comparisons.
std::string report_without_timings(const nlohmann::ordered_json& report);

/// Parses, runs and writes report.json (and spectrum.csv when produced) into
/// output_dir.  Maps errors to exit codes; messages go to `err`.
int run(const std::filesystem::path& config_path, const std::filesystem::path& output_dir, std::ostream& out,
        std::ostream& err);

/// Same as run() for an already-built configuration.
int run_config(const ExperimentConfig& config, const std::optional<std::filesystem::path>& output_dir,
               std::ostream& out, std::ostream& err);

}  // namespace loopbraid
