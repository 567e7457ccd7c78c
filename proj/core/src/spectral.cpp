#include "loopbraid/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "loopbraid/errors.hpp"

namespace loopbraid {

namespace {

void trim_zeros(std::vector<CScalar>& c) {
  while (c.size() > 1 && c.back() == CScalar{}) c.pop_back();
  if (c.empty()) c.push_back(CScalar{});
}

}  // namespace

SpectralPolynomial::SpectralPolynomial(std::vector<CScalar> coeffs) : coeffs_(std::move(coeffs)) {
  trim_zeros(coeffs_);
}

CScalar SpectralPolynomial::eval(CScalar u) const {
  CScalar acc{};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

SpectralPolynomial SpectralPolynomial::derivative() const {
  if (coeffs_.size() == 1) return SpectralPolynomial{};
  std::vector<CScalar> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return SpectralPolynomial(std::move(d));
}

SpectralPolynomial SpectralPolynomial::shifted(CScalar u0) const {
  // Repeated synthetic division by (u - u0) (Taylor shift).
  std::vector<CScalar> c = coeffs_;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += u0 * c[k];
  }
  return SpectralPolynomial(std::move(c));
}

OperatorPolynomial::OperatorPolynomial(std::vector<DenseOperator> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw ArgumentError("OperatorPolynomial: no coefficients");
  for (const auto& c : coeffs_) {
    if (c.dim() != coeffs_.front().dim()) {
      throw ArgumentError("OperatorPolynomial: coefficients differ in dimension");
    }
  }
}

DenseOperator OperatorPolynomial::eval(CScalar u) const {
  Matrix acc = coeffs_.back().matrix();
  for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * u + coeffs_[k].matrix();
  return DenseOperator(std::move(acc));
}

OperatorPolynomial OperatorPolynomial::derivative() const {
  if (coeffs_.size() == 1) return OperatorPolynomial({DenseOperator::zeros(dim())});
  std::vector<DenseOperator> d;
  d.reserve(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(static_cast<double>(k) * coeffs_[k]);
  return OperatorPolynomial(std::move(d)).trimmed();
}

OperatorPolynomial OperatorPolynomial::shifted(CScalar u0) const {
  std::vector<Matrix> c;
  c.reserve(coeffs_.size());
  for (const auto& op : coeffs_) c.push_back(op.matrix());
  const std::size_t n = c.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t k = n - 1; k > i; --k) c[k - 1] += u0 * c[k];
  }
  std::vector<DenseOperator> out;
  out.reserve(n);
  for (auto& m : c) out.emplace_back(std::move(m));
  return OperatorPolynomial(std::move(out));
}

OperatorPolynomial OperatorPolynomial::trimmed(double tol) const {
  double scale = 0.0;
  for (const auto& c : coeffs_) scale = std::max(scale, c.max_abs());
  const double cutoff = tol * (1.0 + scale);
  std::size_t keep = coeffs_.size();
  while (keep > 1) {
    const double m = coeffs_[keep - 1].max_abs();
    if (tol == 0.0 ? m != 0.0 : m > cutoff) break;
    --keep;
  }
  return OperatorPolynomial(std::vector<DenseOperator>(coeffs_.begin(), coeffs_.begin() + keep));
}

CScalar eval(const SpectralPolynomial& p, CScalar u) { return p.eval(u); }
DenseOperator eval(const OperatorPolynomial& p, CScalar u) { return p.eval(u); }
SpectralPolynomial derivative(const SpectralPolynomial& p) { return p.derivative(); }
OperatorPolynomial derivative(const OperatorPolynomial& p) { return p.derivative(); }

OperatorPolynomial interpolate(const std::vector<OperatorSample>& samples, std::size_t degree) {
  const std::size_t n = degree + 1;
  if (samples.size() < n) {
    std::ostringstream os;
    os << "interpolate: degree " << degree << " needs at least " << n << " samples, got "
       << samples.size();
    throw ArgumentError(os.str());
  }
  const std::size_t dim = samples.front().second.dim();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].second.dim() != dim) throw ArgumentError("interpolate: sample dimensions differ");
    for (std::size_t j = 0; j < i; ++j) {
      if (samples[i].first == samples[j].first) {
        std::ostringstream os;
        os << "interpolate: duplicate node u = " << samples[i].first;
        throw ArgumentError(os.str());
      }
    }
  }

  // Monomial coefficients of each Lagrange basis polynomial l_j.
  std::vector<Matrix> coeffs(n, Matrix::Zero(dim, dim));
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<CScalar> basis{CScalar{1.0}};
    CScalar denom{1.0};
    const CScalar xj = samples[j].first;
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      const CScalar xm = samples[m].first;
      std::vector<CScalar> next(basis.size() + 1, CScalar{});
      for (std::size_t k = 0; k < basis.size(); ++k) {
        next[k + 1] += basis[k];
        next[k] -= xm * basis[k];
      }
      basis = std::move(next);
      denom *= (xj - xm);
    }
    for (std::size_t k = 0; k < n; ++k) coeffs[k] += (basis[k] / denom) * samples[j].second.matrix();
  }

  std::vector<DenseOperator> ops;
  ops.reserve(n);
  for (auto& m : coeffs) ops.emplace_back(std::move(m));
  OperatorPolynomial poly(std::move(ops));

  for (const auto& [u, value] : samples) {
    const double r = residual(poly.eval(u), value);
    if (r > kInterpolationTolerance) {
      std::ostringstream os;
      os << "interpolate: sample at u = " << u << " deviates by " << r
         << " from the degree-" << degree << " fit";
      throw NumericalError(os.str());
    }
  }
  return poly.trimmed(1e-12);
}

std::vector<CScalar> chebyshev_nodes(std::size_t count, CScalar center, double radius) {
  std::vector<CScalar> nodes;
  nodes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double theta = std::numbers::pi * (2.0 * static_cast<double>(k) + 1.0) /
                         (2.0 * static_cast<double>(count));
    nodes.push_back(center + radius * std::cos(theta));
  }
  return nodes;
}

}  // namespace loopbraid
