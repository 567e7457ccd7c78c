#pragma once

// Dense complex operators on tensor products of qubit legs.
//
// Basis convention: for an operator on n legs the composite basis index is
// the binary word b_1 b_2 ... b_n with leg 1 as the most significant bit.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace loopbraid {

using CScalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 14;
inline constexpr double kDefaultSingularThreshold = 1e-12;

/// Square complex matrix with finite entries.  Value type; never mutated
/// after construction.
class DenseOperator {
 public:
  /// Throws ArgumentError if `m` is empty, non-square or has non-finite entries.
  explicit DenseOperator(Matrix m);

  static DenseOperator identity(std::size_t dim);
  static DenseOperator zeros(std::size_t dim);
  /// Row-major nested initializer, e.g. from_rows({{0, 1}, {1, 0}}).
  static DenseOperator from_rows(std::initializer_list<std::initializer_list<CScalar>> rows);
  static DenseOperator diagonal(std::initializer_list<CScalar> diag);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  CScalar operator()(std::size_t row, std::size_t col) const { return m_(row, col); }
  const Matrix& matrix() const noexcept { return m_; }

  double max_abs() const;
  CScalar trace() const { return m_.trace(); }
  DenseOperator adjoint() const { return DenseOperator(m_.adjoint()); }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  Matrix m_;
};

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator-(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator-(const DenseOperator& a);
DenseOperator operator*(CScalar s, const DenseOperator& a);
inline DenseOperator operator*(const DenseOperator& a, CScalar s) { return s * a; }
DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);

/// Periodic chain of qubits.
struct ChainGeometry {
  explicit ChainGeometry(int sites);

  int n_sites;

  std::size_t dim() const noexcept { return std::size_t{1} << n_sites; }
  /// Throws ArgumentError naming `what` when n_sites < minimum.
  void require(int minimum, const char* what) const;
  /// Periodic successor of a 1-based site: N -> 1.
  int next(int site) const noexcept { return site % n_sites + 1; }
};

DenseOperator kron(const DenseOperator& a, const DenseOperator& b,
                   std::size_t max_dim = kDefaultMaxDim);

/// Embeds a 4x4 operator on legs (leg_a, leg_b) of an n-leg space, 1-based.
/// The first tensor factor of `op4` acts on leg_a, the second on leg_b.
DenseOperator embed_pair(const DenseOperator& op4, int leg_a, int leg_b, int n_legs,
                         std::size_t max_dim = kDefaultMaxDim);

/// General form of embed_pair: `op` has dimension 2^legs.size() and its k-th
/// tensor factor acts on legs[k].
DenseOperator embed_legs(const DenseOperator& op, std::span<const int> legs, int n_legs,
                         std::size_t max_dim = kDefaultMaxDim);

/// embed_pair(op4, leg_a, leg_b, n) * m without materialising the embedding.
DenseOperator apply_pair(const DenseOperator& op4, int leg_a, int leg_b, const DenseOperator& m);

DenseOperator matmul(const DenseOperator& a, const DenseOperator& b);

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

/// Partial-pivot Gauss-Jordan inverse.  Throws SingularMatrixError when a
/// pivot falls below rel_threshold * max|a_ij|.
DenseOperator inverse(const DenseOperator& a, double rel_threshold = kDefaultSingularThreshold);

/// Traces out the leading tensor factor of dimension first_dim.
DenseOperator partial_trace_first(const DenseOperator& a, std::size_t first_dim);

/// max|a-b| / (1 + max(max|a|, max|b|)).
double residual(const DenseOperator& a, const DenseOperator& b);

/// All eigenvalues sorted by real part, then imaginary part.  Hermitian input
/// (within 1e-12) goes through the self-adjoint solver and yields real values.
std::vector<CScalar> eigenvalues(const DenseOperator& a);

/// Column `index` of `op`, i.e. the image of basis state |index>.
Eigen::VectorXcd apply_to_basis(const DenseOperator& op, std::size_t index);

}  // namespace loopbraid
