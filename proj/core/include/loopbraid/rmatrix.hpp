#pragma once

// R-matrix ansaetze built from the loop braid generators, and residual checks
// for the Yang-Baxter, RTT and ABCD relations.

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "loopbraid/reps.hpp"
#include "loopbraid/spectral.hpp"

namespace loopbraid {

enum class Ansatz {
  A1,        // s + a(u) sigma
  A2,        // 1 + a(u) s sigma
  A3,        // 1 + a(u) s + b(u) B
  Rational,  // u 1 + c s
};

std::string_view to_string(Ansatz a);

/// One of the four ansaetze with its parameters.  R(u) is stored as an
/// operator polynomial, built and validated on construction.
class RMatrixSpec {
 public:
  static RMatrixSpec rational(CScalar c);
  static RMatrixSpec a1(RepresentationParams params, SpectralPolynomial a);
  static RMatrixSpec a2(RepresentationParams params, SpectralPolynomial a);
  static RMatrixSpec a3(RepresentationParams params, SpectralPolynomial a, SpectralPolynomial b);
  /// a(u) = alpha u, b(u) = -2 alpha u
  static RMatrixSpec a3_integrable(RepresentationParams params);

  Ansatz ansatz() const noexcept { return ansatz_; }
  const std::optional<RepresentationParams>& params() const noexcept { return params_; }
  const SpectralPolynomial& a() const noexcept { return a_; }
  const SpectralPolynomial& b() const noexcept { return b_; }
  CScalar c() const noexcept { return c_; }
  const OperatorPolynomial& polynomial() const noexcept { return poly_; }
  /// Realised 4x4 B for A1-A3.
  const std::optional<DenseOperator>& b_matrix() const noexcept { return b_matrix_; }

  std::string describe() const;

 private:
  RMatrixSpec(Ansatz ansatz, std::optional<RepresentationParams> params, SpectralPolynomial a,
              SpectralPolynomial b, CScalar c);

  Ansatz ansatz_;
  std::optional<RepresentationParams> params_;
  SpectralPolynomial a_;
  SpectralPolynomial b_;
  CScalar c_;
  std::optional<DenseOperator> b_matrix_;
  OperatorPolynomial poly_;
};

DenseOperator build_R(const RMatrixSpec& spec, CScalar u);
/// Exact dR/du.
DenseOperator build_R_derivative(const RMatrixSpec& spec, CScalar u);

using RFunction = std::function<DenseOperator(CScalar)>;
RFunction r_function(const RMatrixSpec& spec);

enum class YbeForm {
  Braided,     // R_12(u-v) R_23(u) R_12(v) = R_23(v) R_12(u) R_23(u-v)
  Standard,    // R_12(u) R_13(u+v) R_23(v) = R_23(v) R_13(u+v) R_12(u)
  Difference,  // R_12(u-v) R_13(u) R_23(v) = R_23(v) R_13(u) R_12(u-v)
};

std::string_view to_string(YbeForm f);
/// Human-readable leg/argument pattern, recorded in every report entry.
std::string_view convention_string(YbeForm f);

inline constexpr double kYbeTolerance = 1e-10;

double ybe_residual(const RFunction& r, YbeForm form, CScalar u, CScalar v);
double ybe_residual(const RMatrixSpec& spec, YbeForm form, CScalar u, CScalar v);

/// Braided relation with three independent coefficients:
///   (s + a1 g)_12 (s + a2 g)_23 (s + a3 g)_12 = (s + a3 g)_23 (s + a2 g)_12 (s + a1 g)_23
double ybe_residual_free_coeffs(const DenseOperator& s4, const DenseOperator& sigma4, CScalar a1,
                                CScalar a2, CScalar a3);
/// ArgumentError unless spec is A1.
double ybe_residual_free_coeffs(const RMatrixSpec& spec, CScalar a1, CScalar a2, CScalar a3);

/// T(u) acting on V_0 (x) H, V_0 the leading qubit.
using MonodromyBuilder = std::function<DenseOperator(CScalar)>;

/// R_12(u-v) T_1(u) T_2(v) vs T_2(v) T_1(u) R_12(u-v) on V_1 (x) V_2 (x) H.
double rtt_residual(const RMatrixSpec& r_spec, const MonodromyBuilder& t_builder, CScalar u, CScalar v,
                    std::size_t max_dim = kDefaultMaxDim);

/// Auxiliary block T^{ij}, i, j in {1, 2}.
DenseOperator monodromy_block(const DenseOperator& t, int i, int j);

/// [T^{ij}(u), T^{kl}(v)] vs c/(u-v) (T^{kj}(v) T^{il}(u) - T^{kj}(u) T^{il}(v))
/// with T the rational monodromy on n_sites.  ArgumentError when u = v or
/// the spec is not Rational.
double abcd_residual(const RMatrixSpec& spec, int n_sites, CScalar u, CScalar v, int i, int j, int k,
                     int l);

inline constexpr double kAuxTraceTolerance = 1e-10;

struct AuxTraceResult {
  bool proportional;
  CScalar lambda;  // tr(trace)/2, meaningful when proportional
  double residual;  // residual(trace, lambda 1)
  DenseOperator trace;
};

/// Partial trace of R_{k+1,0}(u) over the auxiliary leg.
AuxTraceResult aux_trace_check(const RMatrixSpec& spec, CScalar u);

}  // namespace loopbraid
