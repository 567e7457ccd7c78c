#include "loopbraid/experiment.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "loopbraid/errors.hpp"
#include "loopbraid/relations.hpp"
#include "loopbraid/rng.hpp"

namespace loopbraid {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<CheckKind, 9> kAllChecks = {CheckKind::Relations, CheckKind::Ybe,
                                                 CheckKind::Rtt,       CheckKind::Abcd,
                                                 CheckKind::TransferCommute, CheckKind::Charges,
                                                 CheckKind::Hamiltonian,     CheckKind::Spectrum,
                                                 CheckKind::Diagnostic};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

json complex_json(CScalar z) { return json::array({z.real(), z.imag()}); }

std::string complex_text(CScalar z) {
  std::ostringstream os;
  os << std::setprecision(17) << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

json polynomial_json(const SpectralPolynomial& p) {
  json arr = json::array();
  for (const auto& c : p.coeffs()) arr.push_back(complex_json(c));
  return arr;
}

[[noreturn]] void config_fail(const std::string& message, const std::string& field, const YAML::Node& node) {
  const int line = node.IsDefined() && node.Mark().line >= 0 ? node.Mark().line + 1 : -1;
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << field << ": " << message;
  throw ConfigError(os.str(), field, line);
}

std::string scalar_text(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) config_fail("expected a scalar", field, node);
  return node.as<std::string>();
}

CScalar yaml_complex(const YAML::Node& node, const std::string& field) {
  try {
    return parse_complex(scalar_text(node, field), field);
  } catch (const ConfigError& e) {
    config_fail(e.what(), field, node);
  }
}

int yaml_int(const YAML::Node& node, const std::string& field) {
  const auto text = scalar_text(node, field);
  double v = 0.0;
  if (!parse_real(text, v) || v != std::floor(v) || std::abs(v) > 1e9) {
    config_fail("expected an integer, got '" + text + "'", field, node);
  }
  return static_cast<int>(v);
}

double yaml_real(const YAML::Node& node, const std::string& field) {
  const auto text = scalar_text(node, field);
  double v = 0.0;
  if (!parse_real(text, v)) config_fail("expected a real number, got '" + text + "'", field, node);
  return v;
}

std::vector<CScalar> yaml_complex_list(const YAML::Node& node, const std::string& field) {
  std::vector<CScalar> out;
  if (node.IsSequence()) {
    for (std::size_t k = 0; k < node.size(); ++k) {
      out.push_back(yaml_complex(node[k], field + "[" + std::to_string(k) + "]"));
    }
  } else if (node.IsScalar()) {
    for (const auto& tok : split(node.as<std::string>(), ',')) out.push_back(parse_complex(tok, field));
  } else {
    config_fail("expected a list of numbers", field, node);
  }
  return out;
}

void reject_unknown_keys(const YAML::Node& map, const std::vector<std::string>& allowed, const std::string& prefix) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_fail("unknown key", prefix.empty() ? key : prefix + "." + key, kv.first);
    }
  }
}

Ansatz parse_ansatz(const std::string& text, const std::string& field) {
  if (text == "a1") return Ansatz::A1;
  if (text == "a2") return Ansatz::A2;
  if (text == "a3") return Ansatz::A3;
  if (text == "rational") return Ansatz::Rational;
  throw ConfigError(field + ": unknown ansatz '" + text + "' (expected a1|a2|a3|rational)", field);
}

DenseOperator read_matrix_file(const std::filesystem::path& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw ConfigError(field + ": cannot read custom B file '" + path.string() + "'", field);
  std::vector<CScalar> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    for (char& ch : line) {
      if (ch == ',' || ch == ';') ch = ' ';
    }
    std::istringstream tokens(line);
    std::string tok;
    while (tokens >> tok) values.push_back(parse_complex(tok, field));
  }
  if (values.size() != 16) {
    throw ConfigError(field + ": custom B file must contain 16 entries (4x4, row-major), found " +
                          std::to_string(values.size()),
                      field);
  }
  Matrix m(4, 4);
  for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = values[k];
  return DenseOperator(std::move(m));
}

constexpr const char* kRelationConvention =
    "generators on legs (i, i+1), periodic labels; residual max|L-R| / (1 + max(|L|,|R|))";
constexpr const char* kCommutatorConvention =
    "T(u) = tr_0 R_0N(u) ... R_01(u); residual max|[A,B]| / (max|A| max|B|)";

// Status of a report entry.
enum class Status { Pass, Fail, Measured };

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Measured: return "measured";
  }
  return "?";
}

class ReportBuilder {
 public:
  void add(const std::string& name, json params, const std::string& convention, double residual,
           double tolerance, bool asserted, json details = nullptr) {
    const Status status = !asserted ? Status::Measured : (residual <= tolerance ? Status::Pass : Status::Fail);
    json e;
    e["name"] = name;
    e["params"] = std::move(params);
    e["convention"] = convention;
    e["residual"] = residual;
    e["tolerance"] = tolerance;
    e["status"] = to_string(status);
    if (!details.is_null()) e["details"] = std::move(details);
    if (status == Status::Fail) failed_ = true;

    std::ostringstream line;
    line << std::left << std::setw(9) << to_string(status) << std::setw(34) << name << " residual "
         << std::scientific << std::setprecision(3) << residual << "  tol " << tolerance;
    if (convention.find(':') != std::string::npos && convention.find(':') < 12) {
      line << "  [" << to_string_short(convention) << "]";
    }
    summary_.push_back(line.str());
    entries_.push_back(std::move(e));
  }

  bool failed() const { return failed_; }
  json take_entries() { return std::move(entries_); }
  std::vector<std::string> take_summary() { return std::move(summary_); }

 private:
  static std::string to_string_short(const std::string& convention) {
    return convention.substr(0, convention.find(':'));
  }

  json entries_ = json::array();
  std::vector<std::string> summary_;
  bool failed_ = false;
};

std::vector<std::pair<CScalar, CScalar>> sweep_points(const ExperimentConfig& cfg, std::uint64_t stream) {
  std::vector<std::pair<CScalar, CScalar>> pts;
  for (const auto& u : cfg.sweep.u) {
    for (const auto& v : cfg.sweep.v) pts.emplace_back(u, v);
  }
  const int random = cfg.sweep.random_pairs >= 0 ? cfg.sweep.random_pairs : (pts.empty() ? cfg.samples : 0);
  CounterRng rng(cfg.seed, stream);
  for (int k = 0; k < random; ++k) {
    const CScalar u = rng.complex_in_box(cfg.sweep.radius);
    const CScalar v = rng.complex_in_box(cfg.sweep.radius);
    pts.emplace_back(u, v);
  }
  return pts;
}

std::vector<CScalar> sample_values(const ExperimentConfig& cfg, std::uint64_t stream) {
  CounterRng rng(cfg.seed, stream);
  std::vector<CScalar> out;
  for (int k = 0; k < cfg.samples; ++k) out.push_back(rng.complex_in_box(cfg.sweep.radius));
  return out;
}

json point_params(const RMatrixSpec& spec, int n_sites, std::optional<CScalar> u, std::optional<CScalar> v) {
  json p;
  p["spec"] = spec.describe();
  p["n_sites"] = n_sites;
  if (u) p["u"] = complex_json(*u);
  if (v) p["v"] = complex_json(*v);
  return p;
}

// Fixed probe points for deciding whether a spec satisfies the standard or
// difference-form YBE, the forms that feed the monodromy construction.
bool standard_certified(const RMatrixSpec& spec, double tol, double& worst) {
  static const std::array<std::pair<CScalar, CScalar>, 3> probes = {{
      {{0.31, 0.07}, {0.17, -0.05}},
      {{-0.43, 0.0}, {0.29, 0.11}},
      {{0.8, 0.0}, {-0.6, 0.0}},
  }};
  double std_worst = 0.0;
  double diff_worst = 0.0;
  for (const auto& [u, v] : probes) {
    std_worst = std::max(std_worst, ybe_residual(spec, YbeForm::Standard, u, v));
    diff_worst = std::max(diff_worst, ybe_residual(spec, YbeForm::Difference, u, v));
  }
  worst = std::min(std_worst, diff_worst);
  return worst <= tol;
}

std::vector<YbeForm> asserted_forms(Ansatz a) {
  switch (a) {
    case Ansatz::A1:
    case Ansatz::A3:
      return {YbeForm::Braided};
    case Ansatz::A2:
    case Ansatz::Rational:
      return {YbeForm::Standard, YbeForm::Difference};
  }
  return {};
}

json pauli_json(const PauliTable& t) {
  static const char* names = "IXYZ";
  json out = json::object();
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (std::abs(t[a][b]) > 1e-14) out[std::string{names[a], names[b]}] = complex_json(t[a][b]);
    }
  }
  return out;
}

// Local bond R'(u0) R(u0)^{-1} of the derived Hamiltonian.
DenseOperator derived_bond(const RMatrixSpec& spec, CScalar u0) {
  return build_R_derivative(spec, u0) * inverse(build_R(spec, u0));
}

struct Runner {
  const ExperimentConfig& cfg;
  ReportBuilder report;
  json classification = json::array();
  json hamiltonian = nullptr;
  json timings = json::object();
  std::optional<Spectrum> spec_result;

  double tol(CheckKind k) const { return tolerance_for(cfg, k); }

  bool certified(const RMatrixSpec& spec, CScalar alpha) {
    double worst = 0.0;
    const bool ok = standard_certified(spec, tol(CheckKind::Ybe), worst);
    json p = point_params(spec, cfg.n_sites, std::nullopt, std::nullopt);
    p["alpha"] = complex_json(alpha);
    report.add("certification:standard-ybe", p, std::string("min over standard/difference forms at 3 probes"),
               worst, tol(CheckKind::Ybe), false, json{{"certified", ok}});
    return ok;
  }

  void relations(CScalar alpha) {
    const GeneratorFamily fam({alpha, cfg.spec.b_choice}, ChainGeometry(cfg.n_sites));
    const auto rep = classify(fam, tol(CheckKind::Relations));
    json base;
    base["alpha"] = complex_json(alpha);
    base["b_choice"] = cfg.spec.b_choice_text;
    base["n_sites"] = cfg.n_sites;
    for (const auto& r : rep.results) {
      json per = json::array();
      for (const auto& ir : r.per_index) per.push_back(json{{"i", ir.i}, {"j", ir.j}, {"residual", ir.residual}});
      report.add("relation:" + std::string(to_string(r.id)), base, std::string(kRelationConvention), r.residual, r.tolerance, true,
                 json{{"per_index", per}});
    }
    report.add("relation:M2-reversed", base, std::string(kRelationConvention), rep.m2_reversed.residual, rep.m2_reversed.tolerance, true);
    if (rep.sigma_inverse_residual) {
      report.add("relation:sigma-inverse", base, std::string("sigma sigma^-1 = 1, sigma^-1 = s - alpha/(1+alpha) B"), *rep.sigma_inverse_residual,
                 tol(CheckKind::Relations), true);
    }
    classification.push_back(json{{"alpha", complex_json(alpha)},
                                  {"b_choice", cfg.spec.b_choice_text},
                                  {"n_sites", cfg.n_sites},
                                  {"group", std::string(to_string(rep.classification))},
                                  {"m4", rep.m4_pass}});
  }

  void ybe(const RMatrixSpec& spec) {
    const auto forms = asserted_forms(spec.ansatz());
    for (const auto& [u, v] : sweep_points(cfg, 1)) {
      for (YbeForm f : {YbeForm::Braided, YbeForm::Standard, YbeForm::Difference}) {
        const bool asserted = std::find(forms.begin(), forms.end(), f) != forms.end();
        report.add("ybe:" + std::string(to_string(f)), point_params(spec, 3, u, v),
                   std::string(convention_string(f)), ybe_residual(spec, f, u, v), tol(CheckKind::Ybe), asserted);
      }
    }
  }

  void rtt(const RMatrixSpec& spec, bool cert) {
    const int n = cfg.n_sites;
    const auto builder = [&spec, n](CScalar x) { return monodromy(spec, x, n); };
    for (const auto& [u, v] : sweep_points(cfg, 2)) {
      report.add("rtt", point_params(spec, n, u, v), std::string("R12(u-v) T1(u) T2(v) = T2(v) T1(u) R12(u-v)"),
                 rtt_residual(spec, builder, u, v), tol(CheckKind::Rtt), cert);
    }
  }

  void abcd(const RMatrixSpec& spec) {
    for (const auto& [u, v] : sweep_points(cfg, 3)) {
      if (u == v) continue;
      double worst = 0.0;
      json per = json::object();
      for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
          for (int k = 1; k <= 2; ++k)
            for (int l = 1; l <= 2; ++l) {
              const double r = abcd_residual(spec, cfg.n_sites, u, v, i, j, k, l);
              per[std::to_string(i) + std::to_string(j) + std::to_string(k) + std::to_string(l)] = r;
              worst = std::max(worst, r);
            }
      report.add("abcd", point_params(spec, cfg.n_sites, u, v),
                 std::string("[T^ij(u), T^kl(v)] = c/(u-v) (T^kj(v) T^il(u) - T^kj(u) T^il(v))"), worst,
                 tol(CheckKind::Abcd), true, json{{"per_index", per}});
    }
  }

  void transfer_commute(const RMatrixSpec& spec, bool cert) {
    for (const auto& [u, v] : sweep_points(cfg, 4)) {
      report.add("transfer-commute", point_params(spec, cfg.n_sites, u, v), std::string(kCommutatorConvention),
                 transfer_commutator(spec, u, v, cfg.n_sites), tol(CheckKind::TransferCommute), cert);
    }
  }

  void charges(const RMatrixSpec& spec, bool cert, CScalar u0) {
    const auto fam = extract_charges(spec, u0, cfg.n_sites, tol(CheckKind::Charges));
    json p = point_params(spec, cfg.n_sites, std::nullopt, std::nullopt);
    p["u0"] = complex_json(u0);
    report.add("charges", p, std::string("log T(u) = sum_k I_k (u-u0)^k; max_kn |[I_k,I_n]| / (1 + |I_k| |I_n|)"), fam.max_commutator, fam.tolerance, cert,
               json{{"count", fam.charges.size()}, {"commutator_residuals", fam.commutator_residuals}});
  }

  void hamiltonian_check(const RMatrixSpec& spec, CScalar u0, bool first) {
    const auto bundle = hamiltonian_bundle(spec, u0, cfg.n_sites);
    json p = point_params(spec, cfg.n_sites, std::nullopt, std::nullopt);
    p["u0"] = complex_json(u0);
    if (bundle.closed_form) {
      const bool asserted = bundle.closed_form_name != "deformed";
      json details{{"closed_form", bundle.closed_form_name}};
      if (bundle.inverse_sum_hypothesis) {
        const auto& h = *bundle.inverse_sum_hypothesis;
        details["hypothesis"] = "closed_form - derived == sum_k R^-1_{k+1,k}(u)";
        details["hypothesis_residual"] = h.residual;
        details["hypothesis_holds"] = h.holds();
      }
      report.add("hamiltonian:closed-form:" + bundle.closed_form_name, p, std::string("H = sum_k R'_{k+1,k}(u0) R^-1_{k+1,k}(u0), periodic"), *bundle.discrepancy_residual,
                 tol(CheckKind::Hamiltonian), asserted, details);
    }
    const auto cmp = compare_derivative_routes(spec, u0, cfg.n_sites);
    report.add("hamiltonian:derivative-route", p, std::string("dT/du T^-1 vs sum R' R^-1"), cmp.residual,
               cmp.tolerance, cmp.regular_point && cmp.aux_trace_proportional,
               json{{"regular_point", cmp.regular_point},
                    {"aux_trace_proportional", cmp.aux_trace_proportional},
                    {"richardson", cmp.refined},
                    {"step", cmp.step}});
    if (!first) return;
    hamiltonian = json::object();
    hamiltonian["u0"] = complex_json(u0);
    hamiltonian["spec"] = spec.describe();
    hamiltonian["hermitian"] = bundle.hermitian;
    hamiltonian["closed_form_present"] = bundle.closed_form.has_value();
    hamiltonian["closed_form"] = bundle.closed_form_name.empty() ? json(nullptr) : json(bundle.closed_form_name);
    hamiltonian["discrepancy_residual"] =
        bundle.discrepancy_residual ? json(*bundle.discrepancy_residual) : json(nullptr);
    if (bundle.inverse_sum_hypothesis) {
      hamiltonian["inverse_sum_hypothesis"] = {{"residual", bundle.inverse_sum_hypothesis->residual},
                                               {"holds", bundle.inverse_sum_hypothesis->holds()}};
    }
    hamiltonian["bond_pauli"] = pauli_json(pauli_decompose(derived_bond(spec, u0)));
  }

  void spectrum_check(const RMatrixSpec& spec, CScalar u0, bool first) {
    const auto h = local_hamiltonian(spec, u0, cfg.n_sites);
    auto sp = spectrum(h);
    json p = point_params(spec, cfg.n_sites, std::nullopt, std::nullopt);
    p["u0"] = complex_json(u0);
    double max_imag = 0.0;
    for (const auto& e : sp.eigenvalues) max_imag = std::max(max_imag, std::abs(e.imag()));
    report.add("spectrum", p, std::string("eigenvalues of H sorted by (re, im); residual = max |im|"), max_imag, 0.0, false,
               json{{"count", sp.eigenvalues.size()},
                    {"hermitian", sp.hermitian},
                    {"min", complex_json(sp.eigenvalues.front())},
                    {"max", complex_json(sp.eigenvalues.back())}});
    if (first) spec_result = std::move(sp);
  }

  void diagnostic(const RMatrixSpec& spec, bool cert, CScalar u0) {
    const auto rep = integrability_diagnostic(spec, u0, cfg.n_sites, sample_values(cfg, 5));
    const bool asserted = cert && rep.aux_trace_proportional;
    json p = point_params(spec, cfg.n_sites, std::nullopt, std::nullopt);
    p["u0"] = complex_json(u0);
    json pts = json::array();
    for (const auto& pt : rep.points) {
      json e{{"v", complex_json(pt.v)}, {"derived", pt.derived_residual}};
      e["closed_form"] = pt.closed_residual ? json(*pt.closed_residual) : json(nullptr);
      pts.push_back(e);
    }
    report.add("diagnostic:[H_derived,T(v)]", p, std::string(kCommutatorConvention), rep.max_derived, tol(CheckKind::Diagnostic), asserted,
               json{{"aux_trace_proportional", rep.aux_trace_proportional}, {"points", pts}});
    if (rep.max_closed) {
      const bool closed_asserted = asserted && rep.closed_form_name != "deformed";
      report.add("diagnostic:[H_closed,T(v)]", p, std::string(kCommutatorConvention), *rep.max_closed, tol(CheckKind::Diagnostic),
                 closed_asserted, json{{"closed_form", rep.closed_form_name}});
    }
  }
};

void validate_config(const ExperimentConfig& cfg, const std::vector<CScalar>& alphas) {
  if (cfg.checks.empty()) throw ConfigError("checks: at least one check is required", "checks");
  if (cfg.n_sites < 1) throw ConfigError("geometry.n_sites: must be >= 1", "geometry.n_sites");
  const auto has = [&](CheckKind k) { return std::find(cfg.checks.begin(), cfg.checks.end(), k) != cfg.checks.end(); };
  if (has(CheckKind::Relations)) {
    if (cfg.n_sites < 4) {
      throw ConfigError("relations: classification needs N >= 4 (far-commutation relations B2, S2, M1)",
                        "geometry.n_sites");
    }
    for (const auto& a : alphas) {
      if (std::abs(1.0 + a) == 0.0) {
        throw ConfigError(
            "relations: alpha = -1 violates the sigma^-1 precondition; sigma^-1 = s - alpha/(1+alpha) B is "
            "undefined and sigma is not invertible",
            "spec.alpha");
      }
    }
  }
  if (has(CheckKind::Abcd) && cfg.spec.ansatz != Ansatz::Rational) {
    throw ConfigError("abcd: the ABCD relation check requires ansatz 'rational'", "spec.ansatz");
  }
  if ((has(CheckKind::Hamiltonian) || has(CheckKind::Spectrum)) && cfg.n_sites < 2) {
    throw ConfigError("hamiltonian: the bond sum needs N >= 2", "geometry.n_sites");
  }
  if (cfg.samples < 0) throw ConfigError("samples: must be >= 0", "samples");
  if ((cfg.sweep.u.empty()) != (cfg.sweep.v.empty())) {
    throw ConfigError("sweep: u and v lists must be given together", "sweep");
  }
}

}  // namespace

std::string_view to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Relations: return "relations";
    case CheckKind::Ybe: return "ybe";
    case CheckKind::Rtt: return "rtt";
    case CheckKind::Abcd: return "abcd";
    case CheckKind::TransferCommute: return "transfer-commute";
    case CheckKind::Charges: return "charges";
    case CheckKind::Hamiltonian: return "hamiltonian";
    case CheckKind::Spectrum: return "spectrum";
    case CheckKind::Diagnostic: return "diagnostic";
  }
  return "?";
}

CheckKind parse_check_kind(const std::string& name) {
  for (CheckKind k : kAllChecks) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("checks: unknown check '" + name + "'", "checks");
}

CScalar parse_complex(const std::string& raw, const std::string& field) {
  const std::string text = trim(raw);
  auto fail = [&]() -> CScalar { throw ConfigError(field + ": cannot parse '" + raw + "' as a complex number", field); };
  if (text.empty()) return fail();
  const char last = text.back();
  if (last != 'i' && last != 'j') {
    double re = 0.0;
    if (!parse_real(text, re)) return fail();
    return {re, 0.0};
  }
  const std::string body = text.substr(0, text.size() - 1);
  // Split at the last sign that is not an exponent sign.
  std::size_t split_at = std::string::npos;
  for (std::size_t k = body.size(); k-- > 1;) {
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
      split_at = k;
      break;
    }
  }
  auto imag_part = [&](const std::string& s) -> double {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    double v = 0.0;
    if (!parse_real(s, v)) fail();
    return v;
  };
  if (split_at == std::string::npos) return {0.0, imag_part(body)};
  double re = 0.0;
  if (!parse_real(body.substr(0, split_at), re)) return fail();
  return {re, imag_part(body.substr(split_at))};
}

SpectralPolynomial parse_polynomial(const std::string& text, const std::string& field) {
  std::vector<CScalar> coeffs;
  for (const auto& tok : split(text, ',')) coeffs.push_back(parse_complex(tok, field));
  return SpectralPolynomial(std::move(coeffs));
}

BChoice parse_b_choice(const std::string& raw, const std::string& field, const std::filesystem::path& base_dir) {
  const std::string text = trim(raw);
  if (text == "zz-half") return bchoice::ZZHalf{};
  if (text.rfind("product:", 0) == 0) {
    const auto parts = split(text.substr(8), ',');
    if (parts.size() != 3) {
      throw ConfigError(field + ": product takes exactly three values l,m,n (one projector used on both sites)",
                        field);
    }
    ProjectorParams p{parse_complex(parts[0], field), parse_complex(parts[1], field), parse_complex(parts[2], field)};
    if (p.constraint_residual() > kProjectorTolerance) {
      std::ostringstream os;
      os << field << ": l^2 + m^2 + n^2 must equal 1/4 (residual " << p.constraint_residual() << ")";
      throw ConfigError(os.str(), field);
    }
    return bchoice::ProductProjector{p};
  }
  if (text.rfind("custom:", 0) == 0) {
    std::filesystem::path path = text.substr(7);
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    return bchoice::Custom{read_matrix_file(path, field)};
  }
  throw ConfigError(field + ": unknown B choice '" + text + "' (expected zz-half | product:l,m,n | custom:file)",
                    field);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& source,
                                   const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ": line " << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(os.str(), "", e.mark.line + 1);
  }
  if (!root.IsMap()) throw ConfigError(source + ": top level must be a mapping", "");

  ExperimentConfig cfg;
  try {
    reject_unknown_keys(root, {"spec", "geometry", "n_sites", "u0", "checks", "tolerances", "sweep", "samples", "seed"},
                        "");
    if (const auto spec = root["spec"]) {
      if (!spec.IsMap()) config_fail("expected a mapping", "spec", spec);
      reject_unknown_keys(spec, {"ansatz", "alpha", "b_choice", "a_poly", "b_poly", "c_const"}, "spec");
      if (spec["ansatz"]) {
        try {
          cfg.spec.ansatz = parse_ansatz(scalar_text(spec["ansatz"], "spec.ansatz"), "spec.ansatz");
        } catch (const ConfigError& e) {
          config_fail(e.what(), "spec.ansatz", spec["ansatz"]);
        }
      }
      if (spec["alpha"]) cfg.spec.alpha = yaml_complex(spec["alpha"], "spec.alpha");
      if (spec["c_const"]) cfg.spec.c_const = yaml_complex(spec["c_const"], "spec.c_const");
      if (spec["b_choice"]) {
        cfg.spec.b_choice_text = scalar_text(spec["b_choice"], "spec.b_choice");
        try {
          cfg.spec.b_choice = parse_b_choice(cfg.spec.b_choice_text, "spec.b_choice", base_dir);
        } catch (const ConfigError& e) {
          config_fail(e.what(), "spec.b_choice", spec["b_choice"]);
        }
      }
      if (spec["a_poly"]) cfg.spec.a_poly = SpectralPolynomial(yaml_complex_list(spec["a_poly"], "spec.a_poly"));
      if (spec["b_poly"]) cfg.spec.b_poly = SpectralPolynomial(yaml_complex_list(spec["b_poly"], "spec.b_poly"));
    }
    if (const auto geo = root["geometry"]) {
      if (!geo.IsMap()) config_fail("expected a mapping", "geometry", geo);
      reject_unknown_keys(geo, {"n_sites"}, "geometry");
      if (geo["n_sites"]) cfg.n_sites = yaml_int(geo["n_sites"], "geometry.n_sites");
    }
    if (root["n_sites"]) cfg.n_sites = yaml_int(root["n_sites"], "n_sites");
    if (cfg.n_sites < 1 || cfg.n_sites > 13) {
      const auto node = root["geometry"] ? root["geometry"]["n_sites"] : root["n_sites"];
      config_fail("must be between 1 and 13", "geometry.n_sites", node);
    }
    if (root["u0"]) cfg.u0 = yaml_complex(root["u0"], "u0");
    if (const auto checks = root["checks"]) {
      if (!checks.IsSequence()) config_fail("expected a list", "checks", checks);
      for (std::size_t k = 0; k < checks.size(); ++k) {
        const std::string field = "checks[" + std::to_string(k) + "]";
        try {
          cfg.checks.push_back(parse_check_kind(scalar_text(checks[k], field)));
        } catch (const ConfigError& e) {
          config_fail(e.what(), field, checks[k]);
        }
      }
    }
    if (const auto tols = root["tolerances"]) {
      if (!tols.IsMap()) config_fail("expected a mapping", "tolerances", tols);
      for (const auto& kv : tols) {
        const auto key = kv.first.as<std::string>();
        try {
          parse_check_kind(key);
        } catch (const ConfigError&) {
          config_fail("unknown check name", "tolerances." + key, kv.first);
        }
        const double t = yaml_real(kv.second, "tolerances." + key);
        if (!(t > 0.0)) config_fail("must be positive", "tolerances." + key, kv.second);
        cfg.tolerances[key] = t;
      }
    }
    if (const auto sweep = root["sweep"]) {
      if (!sweep.IsMap()) config_fail("expected a mapping", "sweep", sweep);
      reject_unknown_keys(sweep, {"u", "v", "alpha", "random_pairs", "radius"}, "sweep");
      if (sweep["u"]) cfg.sweep.u = yaml_complex_list(sweep["u"], "sweep.u");
      if (sweep["v"]) cfg.sweep.v = yaml_complex_list(sweep["v"], "sweep.v");
      if (sweep["alpha"]) cfg.sweep.alpha = yaml_complex_list(sweep["alpha"], "sweep.alpha");
      if (sweep["random_pairs"]) cfg.sweep.random_pairs = yaml_int(sweep["random_pairs"], "sweep.random_pairs");
      if (sweep["radius"]) cfg.sweep.radius = yaml_real(sweep["radius"], "sweep.radius");
    }
    if (root["samples"]) cfg.samples = yaml_int(root["samples"], "samples");
    if (const auto seed = root["seed"]) {
      const auto text = scalar_text(seed, "seed");
      char* end = nullptr;
      const unsigned long long v = std::strtoull(text.c_str(), &end, 0);
      if (text.empty() || end != text.c_str() + text.size() || text[0] == '-') {
        config_fail("expected a non-negative 64-bit integer", "seed", seed);
      }
      cfg.seed = v;
    }
  } catch (const YAML::Exception& e) {
    std::ostringstream os;
    os << source << ": line " << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(os.str(), "", e.mark.line + 1);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what(), e.field(), e.line());
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string(), path.parent_path());
}

RMatrixSpec make_spec(const SpecConfig& spec, CScalar alpha) {
  try {
    const RepresentationParams params{alpha, spec.b_choice};
    switch (spec.ansatz) {
      case Ansatz::Rational:
        return RMatrixSpec::rational(spec.c_const);
      case Ansatz::A1:
        return RMatrixSpec::a1(params, spec.a_poly.value_or(SpectralPolynomial::linear(1.0)));
      case Ansatz::A2:
        return RMatrixSpec::a2(params, spec.a_poly.value_or(SpectralPolynomial::linear(1.0)));
      case Ansatz::A3:
        return RMatrixSpec::a3(params, spec.a_poly.value_or(SpectralPolynomial::linear(alpha)),
                               spec.b_poly.value_or(SpectralPolynomial::linear(-2.0 * alpha)));
    }
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("spec.b_choice: ") + e.what(), "spec.b_choice");
  }
  throw ConfigError("spec.ansatz: unknown ansatz", "spec.ansatz");
}

CScalar default_u0(const ExperimentConfig& config) {
  if (config.u0) return *config.u0;
  return config.spec.ansatz == Ansatz::Rational ? config.spec.c_const / 2.0 : CScalar{};
}

double tolerance_for(const ExperimentConfig& config, CheckKind kind) {
  const auto it = config.tolerances.find(std::string(to_string(kind)));
  if (it != config.tolerances.end()) return it->second;
  switch (kind) {
    case CheckKind::Relations: return kRelationTolerance;
    case CheckKind::Ybe: return kYbeTolerance;
    case CheckKind::Rtt: return 1e-10;
    case CheckKind::Abcd: return 1e-10;
    case CheckKind::TransferCommute: return 1e-9;
    case CheckKind::Charges: return kChargeTolerance;
    case CheckKind::Hamiltonian: return 1e-11;
    case CheckKind::Spectrum: return 0.0;
    case CheckKind::Diagnostic: return 1e-9;
  }
  return 1e-10;
}

json config_to_json(const ExperimentConfig& c) {
  json spec;
  spec["ansatz"] = std::string(to_string(c.spec.ansatz));
  spec["alpha"] = complex_json(c.spec.alpha);
  spec["b_choice"] = c.spec.b_choice_text;
  spec["a_poly"] = c.spec.a_poly ? polynomial_json(*c.spec.a_poly) : json(nullptr);
  spec["b_poly"] = c.spec.b_poly ? polynomial_json(*c.spec.b_poly) : json(nullptr);
  spec["c_const"] = complex_json(c.spec.c_const);

  json out;
  out["spec"] = spec;
  out["geometry"] = {{"n_sites", c.n_sites}, {"boundary", "periodic"}};
  out["u0"] = complex_json(default_u0(c));
  json checks = json::array();
  for (auto k : c.checks) checks.push_back(std::string(to_string(k)));
  out["checks"] = checks;
  json tols = json::object();
  for (auto k : c.checks) tols[std::string(to_string(k))] = tolerance_for(c, k);
  out["tolerances"] = tols;
  json sweep;
  auto list = [](const std::vector<CScalar>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(complex_json(z));
    return a;
  };
  sweep["u"] = list(c.sweep.u);
  sweep["v"] = list(c.sweep.v);
  sweep["alpha"] = list(c.sweep.alpha);
  sweep["random_pairs"] = c.sweep.random_pairs;
  sweep["radius"] = c.sweep.radius;
  out["sweep"] = sweep;
  out["samples"] = c.samples;
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  const std::vector<CScalar> alphas = cfg.sweep.alpha.empty() ? std::vector<CScalar>{cfg.spec.alpha} : cfg.sweep.alpha;
  validate_config(cfg, alphas);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  Runner runner{cfg, {}, json::array(), nullptr, json::object(), std::nullopt};
  const CScalar u0 = default_u0(cfg);
  const auto has = [&](CheckKind k) { return std::find(cfg.checks.begin(), cfg.checks.end(), k) != cfg.checks.end(); };
  const bool needs_cert = has(CheckKind::Rtt) || has(CheckKind::TransferCommute) || has(CheckKind::Charges) ||
                          has(CheckKind::Diagnostic);

  const bool needs_spec = std::any_of(cfg.checks.begin(), cfg.checks.end(),
                                      [](CheckKind k) { return k != CheckKind::Relations; });
  // Rational R does not depend on alpha.
  const std::size_t n_alpha = cfg.spec.ansatz == Ansatz::Rational ? 1 : alphas.size();
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const CScalar alpha = alphas[ai];
    const bool spec_round = ai < n_alpha;
    const bool first = ai == 0;
    std::optional<RMatrixSpec> spec;
    bool cert = false;
    if (spec_round && needs_spec) {
      spec = make_spec(cfg.spec, alpha);
      if (needs_cert) cert = runner.certified(*spec, alpha);
    }
    for (CheckKind k : cfg.checks) {
      if (k != CheckKind::Relations && !spec) continue;
      const auto t0 = clock::now();
      switch (k) {
        case CheckKind::Relations: runner.relations(alpha); break;
        case CheckKind::Ybe: runner.ybe(*spec); break;
        case CheckKind::Rtt: runner.rtt(*spec, cert); break;
        case CheckKind::Abcd: runner.abcd(*spec); break;
        case CheckKind::TransferCommute: runner.transfer_commute(*spec, cert); break;
        case CheckKind::Charges: runner.charges(*spec, cert, u0); break;
        case CheckKind::Hamiltonian: runner.hamiltonian_check(*spec, u0, first); break;
        case CheckKind::Spectrum: runner.spectrum_check(*spec, u0, first); break;
        case CheckKind::Diagnostic: runner.diagnostic(*spec, cert, u0); break;
      }
      const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
      const std::string key = std::string(to_string(k)) + "_ms";
      runner.timings[key] = runner.timings.value(key, 0.0) + ms;
    }
  }

  RunResult result;
  json& r = result.report;
  r["schema_version"] = kSchemaVersion;
  r["config"] = config_to_json(cfg);
  r["seed"] = cfg.seed;
  r["checks"] = runner.report.take_entries();
  if (!runner.classification.empty()) {
    r["classification"] = runner.classification.size() == 1 ? runner.classification[0] : runner.classification;
  }
  if (!runner.hamiltonian.is_null()) r["hamiltonian"] = runner.hamiltonian;
  runner.timings["total_ms"] = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  r["timings"] = runner.timings;

  result.exit_code = runner.report.failed() ? kExitCheckFailed : kExitOk;
  result.summary = runner.report.take_summary();
  if (r.contains("classification")) {
    const auto& c = r["classification"];
    if (c.is_object()) {
      result.summary.push_back("classification: " + c["group"].get<std::string>() +
                               (c["m4"].get<bool>() ? " (M4 holds)" : " (M4 fails)"));
    } else {
      for (const auto& e : c) {
        result.summary.push_back("classification alpha=" + complex_text({e["alpha"][0], e["alpha"][1]}) + ": " +
                                 e["group"].get<std::string>());
      }
    }
  }
  result.spectrum = std::move(runner.spec_result);
  return result;
}

std::string spectrum_csv(const Spectrum& s) {
  std::ostringstream os;
  os << "index,re,im\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    os << k << "," << s.eigenvalues[k].real() << "," << s.eigenvalues[k].imag() << "\n";
  }
  return os.str();
}

std::string report_without_timings(const json& report) {
  json copy = report;
  copy.erase("timings");
  return copy.dump(2);
}

namespace {

void write_atomically(const std::filesystem::path& target, const std::string& content) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'", "out");
    out << content;
    if (!out) throw ConfigError("failed writing '" + tmp.string() + "'", "out");
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace

int run_config(const ExperimentConfig& config, const std::optional<std::filesystem::path>& output_dir,
               std::ostream& out, std::ostream& err) {
  try {
    auto result = run_experiment(config);
    for (const auto& line : result.summary) out << line << "\n";
    if (output_dir) {
      std::error_code ec;
      std::filesystem::create_directories(*output_dir, ec);
      if (ec) throw ConfigError("cannot create output directory '" + output_dir->string() + "'", "out");
      write_atomically(*output_dir / "report.json", result.report.dump(2) + "\n");
      if (result.spectrum) write_atomically(*output_dir / "spectrum.csv", spectrum_csv(*result.spectrum));
      out << "report written to " << (*output_dir / "report.json").string() << "\n";
    }
    out << (result.exit_code == kExitOk ? "all asserted checks passed" : "asserted check(s) FAILED") << "\n";
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ArgumentError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const SizeError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
}

int run(const std::filesystem::path& config_path, const std::filesystem::path& output_dir, std::ostream& out,
        std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return run_config(cfg, output_dir, out, err);
}

}  // namespace loopbraid
