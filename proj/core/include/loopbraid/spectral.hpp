#pragma once

// Polynomials in the spectral parameter u.  Scalar polynomials carry the
// ansatz functions a(u), b(u); operator polynomials carry R(u) and the
// transfer matrix.

#include <cstddef>
#include <utility>
#include <vector>

#include "loopbraid/tensor.hpp"

namespace loopbraid {

/// Scalar polynomial sum_k coeffs[k] u^k.  Trailing zeros are trimmed; the
/// zero polynomial has a single zero coefficient and degree 0.
class SpectralPolynomial {
 public:
  SpectralPolynomial() : coeffs_{CScalar{}} {}
  explicit SpectralPolynomial(std::vector<CScalar> coeffs);

  static SpectralPolynomial constant(CScalar c) { return SpectralPolynomial({c}); }
  /// a(u) = slope * u
  static SpectralPolynomial linear(CScalar slope) { return SpectralPolynomial({CScalar{}, slope}); }

  const std::vector<CScalar>& coeffs() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  bool is_zero() const noexcept { return coeffs_.size() == 1 && coeffs_[0] == CScalar{}; }

  CScalar eval(CScalar u) const;
  SpectralPolynomial derivative() const;
  /// Coefficients of p(u0 + t) as a polynomial in t.
  SpectralPolynomial shifted(CScalar u0) const;

  friend bool operator==(const SpectralPolynomial&, const SpectralPolynomial&) = default;

 private:
  std::vector<CScalar> coeffs_;
};

/// Operator-valued polynomial sum_k coeffs[k] u^k with a common dimension.
class OperatorPolynomial {
 public:
  /// Throws ArgumentError on an empty list or mixed dimensions.
  explicit OperatorPolynomial(std::vector<DenseOperator> coeffs);

  const std::vector<DenseOperator>& coeffs() const noexcept { return coeffs_; }
  std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  std::size_t dim() const noexcept { return coeffs_.front().dim(); }

  DenseOperator eval(CScalar u) const;
  OperatorPolynomial derivative() const;
  OperatorPolynomial shifted(CScalar u0) const;
  /// Drops trailing coefficients whose max-entry is <= tol * (1 + max over all
  /// coefficients).  tol = 0 trims exact zeros only.
  OperatorPolynomial trimmed(double tol = 0.0) const;

 private:
  std::vector<DenseOperator> coeffs_;
};

CScalar eval(const SpectralPolynomial& p, CScalar u);
DenseOperator eval(const OperatorPolynomial& p, CScalar u);
SpectralPolynomial derivative(const SpectralPolynomial& p);
OperatorPolynomial derivative(const OperatorPolynomial& p);

using OperatorSample = std::pair<CScalar, DenseOperator>;

inline constexpr double kInterpolationTolerance = 1e-9;

/// Entrywise Lagrange interpolation of the requested degree.  Uses the first
/// degree+1 samples as nodes; any further samples are consistency checks.
/// The result is trimmed of numerically-zero leading coefficients.
/// Throws ArgumentError on duplicate nodes or too few samples, NumericalError
/// when an extra sample disagrees beyond kInterpolationTolerance.
OperatorPolynomial interpolate(const std::vector<OperatorSample>& samples, std::size_t degree);

/// count Chebyshev points of the first kind scaled to [center-radius, center+radius].
std::vector<CScalar> chebyshev_nodes(std::size_t count, CScalar center, double radius = 1.0);

}  // namespace loopbraid
