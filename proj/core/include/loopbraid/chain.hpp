#pragma once

// Periodic N-site chains built from an R-matrix: monodromy, transfer matrix,
// commuting charges and local Hamiltonians.
//
// Leg layout of the monodromy: leg 1 is the auxiliary space V_0, legs 2..N+1
// are chain sites 1..N.

#include <optional>
#include <string>
#include <vector>

#include "loopbraid/rmatrix.hpp"

namespace loopbraid {

/// T(u) = R_{0N}(u) ... R_{01}(u) on V_0 (x) H, dimension 2^{N+1}.
DenseOperator monodromy(const RMatrixSpec& spec, CScalar u, int n_sites,
                        std::size_t max_dim = kDefaultMaxDim);

/// tr_0 T(u), dimension 2^N.
DenseOperator transfer(const RMatrixSpec& spec, CScalar u, int n_sites,
                       std::size_t max_dim = kDefaultMaxDim);

/// max|[a, b]| / (max|a| max|b|); 0 when either operator vanishes.
double commutator_residual(const DenseOperator& a, const DenseOperator& b);

/// commutator_residual(T(u), T(v)).
double transfer_commutator(const RMatrixSpec& spec, CScalar u, CScalar v, int n_sites);

/// U |b_1 b_2 ... b_N> = |b_N b_1 ... b_{N-1}>, site k+1 receives site k.
DenseOperator translation_operator(int n_sites);

inline constexpr double kChargeTolerance = 1e-9;

/// T(u) = sum_k (u - u0)^k I_k.
struct ChargeFamily {
  CScalar u0;
  std::vector<DenseOperator> charges;  // I_0 .. I_N
  /// residuals[k][n] = max|[I_k, I_n]| / (1 + max|I_k| max|I_n|)
  std::vector<std::vector<double>> commutator_residuals;
  double max_commutator;
  double tolerance;

  bool pass() const { return max_commutator <= tolerance; }
};

/// Interpolates T on N+1 Chebyshev nodes in [u0-1, u0+1], re-centred at u0.
/// An extra off-node evaluation guards the degree assumption (NumericalError).
ChargeFamily extract_charges(const RMatrixSpec& spec, CScalar u0, int n_sites,
                             double tol = kChargeTolerance);

/// sum_k R'_{k+1,k}(u0) R^{-1}_{k+1,k}(u0), site N+1 = site 1.
DenseOperator local_hamiltonian(const RMatrixSpec& spec, CScalar u0, int n_sites);

/// Central difference dT/du at u0 times T(u0)^{-1}.
DenseOperator hamiltonian_via_derivative(const RMatrixSpec& spec, CScalar u0, int n_sites,
                                         double h = 1e-5);

struct DerivativeComparison {
  DenseOperator local;          // sum R' R^{-1}
  DenseOperator via_derivative;
  DenseOperator difference;     // via_derivative - local
  double residual;
  double tolerance;             // max(1e-6, 10 h^2)
  double step;
  bool refined;                 // Richardson extrapolation applied
  bool aux_trace_proportional;
  bool regular_point;           // R(u0) proportional to the swap
  bool agrees() const { return residual <= tolerance; }
};

/// Both Hamiltonian routes, with Richardson refinement of the finite
/// difference when the first estimate is outside tolerance.
DerivativeComparison compare_derivative_routes(const RMatrixSpec& spec, CScalar u0, int n_sites,
                                               double h = 1e-5);

/// (2 / (3c)) sum_k (X_{k+1} X_k + Y_{k+1} Y_k + Z_{k+1} Z_k).
DenseOperator xxx_hamiltonian(CScalar c, int n_sites);

/// sum_i a'/(1+a) [1 + alpha/(1 + (alpha+1) a) B_{i,i+1}].  PoleError when a
/// prefactor denominator vanishes.
DenseOperator closed_form_slb(const SpectralPolynomial& a, CScalar alpha, const DenseOperator& b4,
                              CScalar u, int n_sites);

/// [(1 - alpha^2 u) 1 + alpha (1 - u) s + 2 alpha (u - 1) B] / (1 - alpha^2 u^2)
DenseOperator closed_form_deformed_bond(CScalar alpha, const DenseOperator& b4, CScalar u);

/// Outcome of testing discrepancy == sum_k R^{-1}_{k+1,k}(u).
struct InverseSumHypothesis {
  DenseOperator inverse_sum;
  double residual;
  double tolerance;
  bool holds() const { return residual <= tolerance; }
};

struct HamiltonianBundle {
  CScalar u0;
  DenseOperator derived;                      // sum R' R^{-1}
  std::optional<DenseOperator> closed_form;   // printed model, when one matches
  std::string closed_form_name;               // "xxx", "slb", "deformed" or empty
  std::optional<DenseOperator> discrepancy;   // closed_form - derived
  std::optional<double> discrepancy_residual;
  std::optional<InverseSumHypothesis> inverse_sum_hypothesis;
  bool hermitian;
};

/// Printed deformed Hamiltonian together with the derived one for the A3 spec
/// with a = alpha u, b = -2 alpha u.  PoleError at alpha u = +-1.
HamiltonianBundle closed_form_deformed(CScalar alpha, const BChoice& b_choice, CScalar u, int n_sites);

/// Derived Hamiltonian plus whichever closed form matches the spec:
/// rational at u0 = c/2, A2, A3 with the integrable coefficients.
HamiltonianBundle hamiltonian_bundle(const RMatrixSpec& spec, CScalar u0, int n_sites);

/// Expected Pauli table of P (x) P for P = 1/2 + lX + mY + nZ, term by term.
PauliTable product_projector_table(const ProjectorParams& p);

struct Model1Term {
  DenseOperator bond;          // deformed bond with B = P (x) P
  PauliTable decomposition;    // pauli_decompose(P (x) P)
  PauliTable expected;         // product_projector_table(p)
  double table_residual;       // max entrywise |decomposition - expected|
};

Model1Term model1_term(const ProjectorParams& p, CScalar alpha, CScalar u);

/// Traceless part of the ZZHalf deformed bond against c (XX + YY - ZZ) with
/// c = alpha (1 - u) / (2 (1 - alpha^2 u^2)).
struct Model2Structure {
  CScalar predicted;   // the coefficient above
  CScalar fitted;      // least-squares coefficient of XX + YY - ZZ
  double residual;     // residual(traceless part, predicted (XX + YY - ZZ))
};

Model2Structure model2_structure(CScalar alpha, CScalar u);

struct Spectrum {
  std::vector<CScalar> eigenvalues;
  bool hermitian;
};

Spectrum spectrum(const DenseOperator& h);

struct DiagnosticPoint {
  CScalar v;
  double derived_residual;                 // commutator_residual(H_derived, T(v))
  std::optional<double> closed_residual;   // same for the printed closed form
};

struct IntegrabilityReport {
  CScalar u0;
  int n_sites;
  bool aux_trace_proportional;
  std::string closed_form_name;
  std::vector<DiagnosticPoint> points;
  double max_derived;
  std::optional<double> max_closed;
};

IntegrabilityReport integrability_diagnostic(const RMatrixSpec& spec, CScalar u0, int n_sites,
                                             const std::vector<CScalar>& samples);

}  // namespace loopbraid
