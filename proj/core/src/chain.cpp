#include "loopbraid/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loopbraid/errors.hpp"

namespace loopbraid {

namespace {

void require_chain_dim(int n_sites, int extra_legs, std::size_t max_dim, const char* what) {
  if (n_sites < 1) throw ArgumentError(std::string(what) + ": n_sites must be >= 1");
  if (n_sites + extra_legs > 62 || (std::size_t{1} << (n_sites + extra_legs)) > max_dim) {
    std::ostringstream os;
    os << what << ": N = " << n_sites << " needs dimension 2^" << n_sites + extra_legs
       << ", above cap " << max_dim;
    throw SizeError(os.str());
  }
}

// sum over bonds k = 1..N of op4 embedded on (k+1, k), site N+1 = 1.
DenseOperator bond_sum(const DenseOperator& op4, int n_sites) {
  const ChainGeometry geo(n_sites);
  geo.require(2, "bond sum");
  Matrix acc = Matrix::Zero(geo.dim(), geo.dim());
  for (int k = 1; k <= n_sites; ++k) acc += embed_pair(op4, geo.next(k), k, n_sites).matrix();
  return DenseOperator(std::move(acc));
}

// Traceless combination XX + YY - ZZ on two legs.
DenseOperator xxz_pattern() {
  const auto x = pauli(Pauli::X);
  const auto y = pauli(Pauli::Y);
  const auto z = pauli(Pauli::Z);
  return kron(x, x) + kron(y, y) - kron(z, z);
}

double charge_commutator_residual(const DenseOperator& a, const DenseOperator& b) {
  const double c = commutator(a, b).max_abs();
  return c / (1.0 + a.max_abs() * b.max_abs());
}

}  // namespace

DenseOperator monodromy(const RMatrixSpec& spec, CScalar u, int n_sites, std::size_t max_dim) {
  require_chain_dim(n_sites, 1, max_dim, "monodromy");
  const auto r = build_R(spec, u);
  const int n_legs = n_sites + 1;
  DenseOperator t = embed_pair(r, 1, 2, n_legs, max_dim);
  for (int k = 2; k <= n_sites; ++k) t = apply_pair(r, 1, k + 1, t);
  return t;
}

DenseOperator transfer(const RMatrixSpec& spec, CScalar u, int n_sites, std::size_t max_dim) {
  return partial_trace_first(monodromy(spec, u, n_sites, max_dim), 2);
}

double commutator_residual(const DenseOperator& a, const DenseOperator& b) {
  const double norm = a.max_abs() * b.max_abs();
  if (norm == 0.0) return 0.0;
  return commutator(a, b).max_abs() / norm;
}

double transfer_commutator(const RMatrixSpec& spec, CScalar u, CScalar v, int n_sites) {
  return commutator_residual(transfer(spec, u, n_sites), transfer(spec, v, n_sites));
}

DenseOperator translation_operator(int n_sites) {
  const ChainGeometry geo(n_sites);
  const std::size_t dim = geo.dim();
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t in = 0; in < dim; ++in) {
    // Site 1 is the most significant bit; shifting sites right is a rotate
    // of the index by one bit towards the least significant end.
    const std::size_t last = in & 1u;
    const std::size_t out = (in >> 1) | (last << (n_sites - 1));
    m(out, in) = 1.0;
  }
  return DenseOperator(std::move(m));
}

ChargeFamily extract_charges(const RMatrixSpec& spec, CScalar u0, int n_sites, double tol) {
  require_chain_dim(n_sites, 1, kDefaultMaxDim, "extract_charges");
  const auto degree = static_cast<std::size_t>(n_sites) * spec.polynomial().degree();
  std::vector<OperatorSample> samples;
  for (const auto& node : chebyshev_nodes(degree + 1, u0, 1.0)) {
    samples.emplace_back(node, transfer(spec, node, n_sites));
  }
  auto poly = interpolate(samples, degree);

  const CScalar probe = u0 + CScalar{0.37, 0.11};
  const double guard = residual(poly.eval(probe), transfer(spec, probe, n_sites));
  if (guard > kInterpolationTolerance) {
    std::ostringstream os;
    os << "extract_charges: interpolant of degree " << degree << " misses T(u) off-node by " << guard;
    throw NumericalError(os.str());
  }

  const auto centred = poly.shifted(u0);
  ChargeFamily fam{u0, centred.coeffs(), {}, 0.0, tol};
  while (fam.charges.size() < degree + 1) fam.charges.push_back(DenseOperator::zeros(centred.dim()));

  const std::size_t n = fam.charges.size();
  fam.commutator_residuals.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double r = charge_commutator_residual(fam.charges[a], fam.charges[b]);
      fam.commutator_residuals[a][b] = fam.commutator_residuals[b][a] = r;
      fam.max_commutator = std::max(fam.max_commutator, r);
    }
  }
  return fam;
}

DenseOperator local_hamiltonian(const RMatrixSpec& spec, CScalar u0, int n_sites) {
  const auto r_inv = inverse(build_R(spec, u0));
  return bond_sum(build_R_derivative(spec, u0) * r_inv, n_sites);
}

DenseOperator hamiltonian_via_derivative(const RMatrixSpec& spec, CScalar u0, int n_sites, double h) {
  if (!(h > 0.0)) throw ArgumentError("hamiltonian_via_derivative: step must be positive");
  const auto d = (1.0 / (2.0 * h)) * (transfer(spec, u0 + h, n_sites) - transfer(spec, u0 - h, n_sites));
  return d * inverse(transfer(spec, u0, n_sites));
}

DerivativeComparison compare_derivative_routes(const RMatrixSpec& spec, CScalar u0, int n_sites, double h) {
  auto local = local_hamiltonian(spec, u0, n_sites);
  auto via = hamiltonian_via_derivative(spec, u0, n_sites, h);
  const double tol = std::max(1e-6, 10.0 * h * h);
  bool refined = false;
  double r = residual(via, local);
  if (r > tol) {
    // Richardson: (4 D(h/2) - D(h)) / 3 cancels the h^2 term.
    const auto half = hamiltonian_via_derivative(spec, u0, n_sites, h / 2.0);
    via = (1.0 / 3.0) * (4.0 * half - via);
    refined = true;
    r = residual(via, local);
  }
  const auto r0 = build_R(spec, u0);
  const auto s = permutation_op();
  const CScalar ratio = r0(1, 2);  // swap matrix has unit (01,10) entry
  const bool regular = std::abs(ratio) > 0.0 && residual(r0, ratio * s) <= 1e-12;
  auto diff = via - local;
  return {std::move(local), std::move(via), std::move(diff), r, tol, h, refined,
          aux_trace_check(spec, u0).proportional, regular};
}

DenseOperator xxx_hamiltonian(CScalar c, int n_sites) {
  const auto x = pauli(Pauli::X);
  const auto y = pauli(Pauli::Y);
  const auto z = pauli(Pauli::Z);
  const auto bond = kron(x, x) + kron(y, y) + kron(z, z);
  return (2.0 / (3.0 * c)) * bond_sum(bond, n_sites);
}

DenseOperator closed_form_slb(const SpectralPolynomial& a, CScalar alpha, const DenseOperator& b4, CScalar u,
                              int n_sites) {
  const CScalar av = a.eval(u);
  const CScalar d1 = 1.0 + av;
  const CScalar d2 = 1.0 + (alpha + 1.0) * av;
  if (std::abs(d1) < 1e-14) throw PoleError("closed_form_slb: pole in a'/(1+a)", "1 + a(u)");
  if (std::abs(d2) < 1e-14) {
    throw PoleError("closed_form_slb: pole in alpha/(1+(alpha+1)a)", "1 + (alpha+1) a(u)");
  }
  const CScalar pref = a.derivative().eval(u) / d1;
  const auto bond = pref * (DenseOperator::identity(4) + (alpha / d2) * b4);
  return bond_sum(bond, n_sites);
}

DenseOperator closed_form_deformed_bond(CScalar alpha, const DenseOperator& b4, CScalar u) {
  const CScalar denom = 1.0 - alpha * alpha * u * u;
  if (std::abs(denom) < 1e-14) throw PoleError("closed_form_deformed: pole at alpha u = +-1", "1 - alpha^2 u^2");
  const auto id = DenseOperator::identity(4);
  const auto s = permutation_op();
  return (1.0 / denom) *
         ((1.0 - alpha * alpha * u) * id + (alpha * (1.0 - u)) * s + (2.0 * alpha * (u - 1.0)) * b4);
}

namespace {

InverseSumHypothesis test_inverse_sum(const RMatrixSpec& spec, const DenseOperator& discrepancy, CScalar u,
                                      int n_sites) {
  auto inv_sum = bond_sum(inverse(build_R(spec, u)), n_sites);
  const double r = residual(discrepancy, inv_sum);
  return {std::move(inv_sum), r, 1e-10};
}

void attach_closed_form(HamiltonianBundle& bundle, DenseOperator closed, std::string name) {
  bundle.discrepancy = closed - bundle.derived;
  bundle.discrepancy_residual = residual(closed, bundle.derived);
  bundle.closed_form = std::move(closed);
  bundle.closed_form_name = std::move(name);
}

bool is_integrable_a3(const RMatrixSpec& spec) {
  if (spec.ansatz() != Ansatz::A3) return false;
  const CScalar alpha = spec.params()->alpha;
  return spec.a() == SpectralPolynomial::linear(alpha) && spec.b() == SpectralPolynomial::linear(-2.0 * alpha);
}

}  // namespace

HamiltonianBundle closed_form_deformed(CScalar alpha, const BChoice& b_choice, CScalar u, int n_sites) {
  const auto spec = RMatrixSpec::a3_integrable({alpha, b_choice});
  const auto closed = bond_sum(closed_form_deformed_bond(alpha, *spec.b_matrix(), u), n_sites);
  auto derived = local_hamiltonian(spec, u, n_sites);
  HamiltonianBundle bundle{u, std::move(derived), std::nullopt, {}, std::nullopt, std::nullopt, std::nullopt, false};
  attach_closed_form(bundle, closed, "deformed");
  bundle.inverse_sum_hypothesis = test_inverse_sum(spec, *bundle.discrepancy, u, n_sites);
  bundle.hermitian = bundle.derived.is_hermitian();
  return bundle;
}

HamiltonianBundle hamiltonian_bundle(const RMatrixSpec& spec, CScalar u0, int n_sites) {
  if (is_integrable_a3(spec)) return closed_form_deformed(spec.params()->alpha, spec.params()->b_choice, u0, n_sites);

  HamiltonianBundle bundle{u0, local_hamiltonian(spec, u0, n_sites), std::nullopt, {}, std::nullopt,
                           std::nullopt, std::nullopt, false};
  switch (spec.ansatz()) {
    case Ansatz::Rational:
      if (std::abs(u0 - spec.c() / 2.0) <= 1e-15 * (1.0 + std::abs(spec.c()))) {
        attach_closed_form(bundle, xxx_hamiltonian(spec.c(), n_sites), "xxx");
      }
      break;
    case Ansatz::A2:
      attach_closed_form(bundle,
                         closed_form_slb(spec.a(), spec.params()->alpha, *spec.b_matrix(), u0, n_sites), "slb");
      break;
    default:
      break;
  }
  bundle.hermitian = bundle.derived.is_hermitian();
  return bundle;
}

PauliTable product_projector_table(const ProjectorParams& p) {
  // Index order I, X, Y, Z.
  const CScalar l = p.l, m = p.m, n = p.n;
  PauliTable t{};
  t[0][0] = 0.25;
  t[1][1] = l * l;
  t[2][2] = m * m;
  t[3][3] = n * n;
  t[1][0] = t[0][1] = l / 2.0;
  t[2][0] = t[0][2] = m / 2.0;
  t[3][0] = t[0][3] = n / 2.0;
  t[1][2] = t[2][1] = l * m;
  t[2][3] = t[3][2] = m * n;
  t[3][1] = t[1][3] = l * n;
  return t;
}

Model1Term model1_term(const ProjectorParams& p, CScalar alpha, CScalar u) {
  const auto proj = build_projector(p);
  const auto b = kron(proj, proj);
  Model1Term term{closed_form_deformed_bond(alpha, b, u), pauli_decompose(b), product_projector_table(p), 0.0};
  for (int a = 0; a < 4; ++a) {
    for (int c = 0; c < 4; ++c) {
      term.table_residual = std::max(term.table_residual, std::abs(term.decomposition[a][c] - term.expected[a][c]));
    }
  }
  return term;
}

Model2Structure model2_structure(CScalar alpha, CScalar u) {
  const auto bond = closed_form_deformed_bond(alpha, build_B(bchoice::ZZHalf{}), u);
  const auto traceless = bond - (bond.trace() / 4.0) * DenseOperator::identity(4);
  const auto pattern = xxz_pattern();
  const CScalar predicted = alpha * (1.0 - u) / (2.0 * (1.0 - alpha * alpha * u * u));
  // <pattern, traceless> / <pattern, pattern>, Hilbert-Schmidt.
  const CScalar fitted = (pattern.adjoint() * traceless).trace() / (pattern.adjoint() * pattern).trace();
  return {predicted, fitted, residual(traceless, predicted * pattern)};
}

Spectrum spectrum(const DenseOperator& h) { return {eigenvalues(h), h.is_hermitian(1e-12)}; }

IntegrabilityReport integrability_diagnostic(const RMatrixSpec& spec, CScalar u0, int n_sites,
                                             const std::vector<CScalar>& samples) {
  const auto bundle = hamiltonian_bundle(spec, u0, n_sites);
  IntegrabilityReport report{u0, n_sites, aux_trace_check(spec, u0).proportional, bundle.closed_form_name, {}, 0.0,
                             std::nullopt};
  for (const auto& v : samples) {
    const auto t = transfer(spec, v, n_sites);
    DiagnosticPoint p{v, commutator_residual(bundle.derived, t), std::nullopt};
    report.max_derived = std::max(report.max_derived, p.derived_residual);
    if (bundle.closed_form) {
      p.closed_residual = commutator_residual(*bundle.closed_form, t);
      report.max_closed = std::max(report.max_closed.value_or(0.0), *p.closed_residual);
    }
    report.points.push_back(p);
  }
  return report;
}

}  // namespace loopbraid
