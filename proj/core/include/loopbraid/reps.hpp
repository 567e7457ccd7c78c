#pragma once

// Matrix representations of the symmetric loop braid generators on qubit
// chains: permutation s, projector-built B, and sigma = s + alpha B.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "loopbraid/tensor.hpp"

namespace loopbraid {

enum class Pauli { I, X, Y, Z };

DenseOperator pauli(Pauli kind);

/// The two-site swap (1 + XX + YY + ZZ)/2.
DenseOperator permutation_op();

/// Coefficients of P = 1/2 + l X + m Y + n Z; complex values allowed.
struct ProjectorParams {
  CScalar l;
  CScalar m;
  CScalar n;

  /// |l^2 + m^2 + n^2 - 1/4|
  double constraint_residual() const;
};

inline constexpr double kProjectorTolerance = 1e-12;

/// Throws ArgumentError (naming the residual) if l^2+m^2+n^2 != 1/4.
DenseOperator build_projector(const ProjectorParams& p);

namespace bchoice {
struct ProductProjector {
  ProjectorParams params;
};
/// B = (1 + ZZ)/2
struct ZZHalf {};
struct Custom {
  DenseOperator matrix;
};
}  // namespace bchoice

using BChoice = std::variant<bchoice::ProductProjector, bchoice::ZZHalf, bchoice::Custom>;

std::string describe(const BChoice& choice);

inline constexpr double kBAxiomTolerance = 1e-12;

/// Residuals of the three B axioms: B^2 = B, [B_{12}, B_{23}] = 0 and s B = B.
struct BValidation {
  double idempotence = 0.0;
  double neighbor_commutation = 0.0;
  double swap_invariance = 0.0;
  double tolerance = kBAxiomTolerance;

  bool idempotence_ok() const { return idempotence <= tolerance; }
  bool neighbor_commutation_ok() const { return neighbor_commutation <= tolerance; }
  bool swap_invariance_ok() const { return swap_invariance <= tolerance; }
  bool ok() const { return idempotence_ok() && neighbor_commutation_ok() && swap_invariance_ok(); }
  std::vector<std::string> failed() const;
};

/// Never throws on axiom failure; failures are reported.  n_probe >= 3 sets
/// the chain length on which neighbor commutation is probed.
BValidation validate_B(const DenseOperator& b, int n_probe = 3);

/// Realised 4x4 B.  Throws ValidationError if the matrix fails validate_B.
DenseOperator build_B(const BChoice& choice);

struct RepresentationParams {
  CScalar alpha;
  BChoice b_choice;
};

/// sigma = s + alpha B
DenseOperator build_sigma(const RepresentationParams& params);
/// sigma^{-1} = s - alpha/(1+alpha) B; ArgumentError at alpha = -1.
DenseOperator sigma_inverse(const RepresentationParams& params);
/// Closed form of sigma^k:
///   odd k:  s + ((alpha+1)^k - 1) B
///   even k: 1 + ((alpha+1)^k - 1) B
DenseOperator sigma_power(const RepresentationParams& params, int k);

/// Pauli-basis coefficients: op = sum_{a,b} coeff[a][b] sigma_a (x) sigma_b,
/// with index order I, X, Y, Z.
using PauliTable = std::array<std::array<CScalar, 4>, 4>;
PauliTable pauli_decompose(const DenseOperator& op4);

enum class Generator { S, Sigma };

/// s_i and sigma_i on an N-site chain, each supported on legs (i, i+1).
class GeneratorFamily {
 public:
  /// Validated representation: s from permutation_op(), sigma = s + alpha B.
  GeneratorFamily(const RepresentationParams& params, ChainGeometry geometry);

  /// Raw local generators, no validation.  Used for negative controls.
  static GeneratorFamily from_local(DenseOperator s4, DenseOperator sigma4, ChainGeometry geometry);

  const ChainGeometry& geometry() const noexcept { return geometry_; }
  const DenseOperator& local(Generator which) const noexcept {
    return which == Generator::S ? s4_ : sigma4_;
  }
  /// Inverse of the local sigma, or nullptr when not available.
  const DenseOperator* local_sigma_inverse() const noexcept {
    return sigma_inv4_ ? &*sigma_inv4_ : nullptr;
  }

  /// 1 <= i <= N-1, else ArgumentError.
  DenseOperator generator(Generator which, int i) const;

 private:
  GeneratorFamily(DenseOperator s4, DenseOperator sigma4, std::optional<DenseOperator> inv,
                  ChainGeometry geometry);

  DenseOperator s4_;
  DenseOperator sigma4_;
  std::optional<DenseOperator> sigma_inv4_;
  ChainGeometry geometry_;
};

DenseOperator family_generator(const GeneratorFamily& fam, Generator which, int i);

}  // namespace loopbraid
