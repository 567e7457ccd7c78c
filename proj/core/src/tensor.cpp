#include "loopbraid/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "loopbraid/errors.hpp"

namespace loopbraid {

namespace {

void require_same_dim(const DenseOperator& a, const DenseOperator& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream os;
    os << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw ArgumentError(os.str());
  }
}

void require_within_cap(std::size_t dim, std::size_t max_dim, const char* op) {
  if (dim > max_dim) {
    std::ostringstream os;
    os << op << ": dimension " << dim << " exceeds cap " << max_dim;
    throw SizeError(os.str());
  }
}

// Bit mask of a 1-based leg in an n-leg index (leg 1 = most significant).
std::size_t leg_mask(int leg, int n_legs) {
  return std::size_t{1} << (n_legs - leg);
}

}  // namespace

DenseOperator::DenseOperator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw ArgumentError("DenseOperator: matrix must be square and non-empty");
  }
  if (!m_.allFinite()) {
    throw ArgumentError("DenseOperator: non-finite entry");
  }
}

DenseOperator DenseOperator::identity(std::size_t dim) {
  return DenseOperator(Matrix::Identity(dim, dim));
}

DenseOperator DenseOperator::zeros(std::size_t dim) {
  return DenseOperator(Matrix::Zero(dim, dim));
}

DenseOperator DenseOperator::from_rows(
    std::initializer_list<std::initializer_list<CScalar>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw ArgumentError("DenseOperator::from_rows: ragged rows");
    }
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  return DenseOperator(std::move(m));
}

DenseOperator DenseOperator::diagonal(std::initializer_list<CScalar> diag) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (const auto& v : diag) {
    m(k, k) = v;
    ++k;
  }
  return DenseOperator(std::move(m));
}

double DenseOperator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

bool DenseOperator::is_hermitian(double tol) const {
  return residual(*this, adjoint()) <= tol;
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "operator+");
  return DenseOperator(a.matrix() + b.matrix());
}

DenseOperator operator-(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "operator-");
  return DenseOperator(a.matrix() - b.matrix());
}

DenseOperator operator-(const DenseOperator& a) { return DenseOperator(-a.matrix()); }

DenseOperator operator*(CScalar s, const DenseOperator& a) { return DenseOperator(s * a.matrix()); }

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) { return matmul(a, b); }

ChainGeometry::ChainGeometry(int sites) : n_sites(sites) {
  if (sites < 1) throw ArgumentError("ChainGeometry: n_sites must be >= 1");
  if (sites > 30) throw SizeError("ChainGeometry: n_sites too large for dense storage");
}

void ChainGeometry::require(int minimum, const char* what) const {
  if (n_sites < minimum) {
    std::ostringstream os;
    os << what << " requires N >= " << minimum << " (got N = " << n_sites << ")";
    throw ArgumentError(os.str());
  }
}

DenseOperator kron(const DenseOperator& a, const DenseOperator& b, std::size_t max_dim) {
  const std::size_t da = a.dim();
  const std::size_t db = b.dim();
  if (da > max_dim / db) {
    std::ostringstream os;
    os << "kron: dimension " << da << "*" << db << " exceeds cap " << max_dim;
    throw SizeError(os.str());
  }
  Matrix out(da * db, da * db);
  for (std::size_t i = 0; i < da; ++i) {
    for (std::size_t j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
    }
  }
  return DenseOperator(std::move(out));
}

DenseOperator embed_legs(const DenseOperator& op, std::span<const int> legs, int n_legs,
                         std::size_t max_dim) {
  const int k = static_cast<int>(legs.size());
  if (n_legs < 1 || n_legs > 62) throw ArgumentError("embed_legs: invalid leg count");
  if (k < 1 || op.dim() != (std::size_t{1} << k)) {
    throw ArgumentError("embed_legs: operator dimension must be 2^(number of legs)");
  }
  std::size_t used = 0;
  for (int leg : legs) {
    if (leg < 1 || leg > n_legs) {
      std::ostringstream os;
      os << "embed_legs: leg " << leg << " out of range 1.." << n_legs;
      throw ArgumentError(os.str());
    }
    const std::size_t mask = leg_mask(leg, n_legs);
    if (used & mask) throw ArgumentError("embed_legs: repeated leg");
    used |= mask;
  }
  const std::size_t dim = std::size_t{1} << n_legs;
  require_within_cap(dim, max_dim, "embed_legs");

  std::vector<std::size_t> masks(k);
  for (int q = 0; q < k; ++q) masks[q] = leg_mask(legs[q], n_legs);

  // Scatter pattern of local index -> composite bits on the chosen legs.
  const std::size_t local = op.dim();
  std::vector<std::size_t> spread(local, 0);
  for (std::size_t li = 0; li < local; ++li) {
    for (int q = 0; q < k; ++q) {
      if (li & (std::size_t{1} << (k - 1 - q))) spread[li] |= masks[q];
    }
  }

  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    if (col & used) continue;
    // col is a "base" index with all active legs cleared.
    for (std::size_t in = 0; in < local; ++in) {
      const std::size_t c = col | spread[in];
      for (std::size_t o = 0; o < local; ++o) {
        const CScalar v = op(o, in);
        if (v != CScalar{}) out(col | spread[o], c) = v;
      }
    }
  }
  return DenseOperator(std::move(out));
}

DenseOperator embed_pair(const DenseOperator& op4, int leg_a, int leg_b, int n_legs,
                         std::size_t max_dim) {
  if (op4.dim() != 4) throw ArgumentError("embed_pair: operator must be 4x4");
  if (leg_a == leg_b) throw ArgumentError("embed_pair: legs must differ");
  if (leg_a < 1 || leg_b < 1 || leg_a > n_legs || leg_b > n_legs) {
    std::ostringstream os;
    os << "embed_pair: legs (" << leg_a << ", " << leg_b << ") out of range 1.." << n_legs;
    throw ArgumentError(os.str());
  }
  const int legs[2] = {leg_a, leg_b};
  return embed_legs(op4, legs, n_legs, max_dim);
}

DenseOperator apply_pair(const DenseOperator& op4, int leg_a, int leg_b, const DenseOperator& m) {
  if (op4.dim() != 4) throw ArgumentError("apply_pair: operator must be 4x4");
  const std::size_t dim = m.dim();
  if (dim < 4 || (dim & (dim - 1)) != 0) throw ArgumentError("apply_pair: dimension must be 2^n, n >= 2");
  int n_legs = 0;
  while ((std::size_t{1} << n_legs) < dim) ++n_legs;
  if (leg_a == leg_b || leg_a < 1 || leg_b < 1 || leg_a > n_legs || leg_b > n_legs) {
    throw ArgumentError("apply_pair: invalid legs");
  }
  const std::size_t ma = leg_mask(leg_a, n_legs);
  const std::size_t mb = leg_mask(leg_b, n_legs);
  const std::size_t offs[4] = {0, mb, ma, ma | mb};
  const Eigen::Matrix4cd local = op4.matrix();

  const Matrix& src = m.matrix();
  Matrix out(dim, dim);
  for (std::size_t base = 0; base < dim; ++base) {
    if (base & (ma | mb)) continue;
    const Eigen::Index r[4] = {static_cast<Eigen::Index>(base | offs[0]),
                               static_cast<Eigen::Index>(base | offs[1]),
                               static_cast<Eigen::Index>(base | offs[2]),
                               static_cast<Eigen::Index>(base | offs[3])};
    for (int o = 0; o < 4; ++o) {
      out.row(r[o]) = local(o, 0) * src.row(r[0]) + local(o, 1) * src.row(r[1]) +
                      local(o, 2) * src.row(r[2]) + local(o, 3) * src.row(r[3]);
    }
  }
  return DenseOperator(std::move(out));
}

DenseOperator matmul(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "matmul");
  Matrix out = a.matrix() * b.matrix();
  return DenseOperator(std::move(out));
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "commutator");
  Matrix out = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  return DenseOperator(std::move(out));
}

DenseOperator inverse(const DenseOperator& a, double rel_threshold) {
  const auto n = static_cast<Eigen::Index>(a.dim());
  Matrix work = a.matrix();
  Matrix inv = Matrix::Identity(n, n);
  const double scale = a.max_abs();
  const double threshold = rel_threshold * scale;

  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot_row = col;
    double best = std::abs(work(col, col));
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double v = std::abs(work(r, col));
      if (v > best) {
        best = v;
        pivot_row = r;
      }
    }
    if (scale == 0.0 || best <= threshold) {
      std::ostringstream os;
      os << "inverse: singular matrix (pivot " << best << " at column " << col
         << " below threshold " << threshold << ")";
      throw SingularMatrixError(os.str(), best, threshold);
    }
    if (pivot_row != col) {
      work.row(col).swap(work.row(pivot_row));
      inv.row(col).swap(inv.row(pivot_row));
    }
    const CScalar p = work(col, col);
    work.row(col) /= p;
    inv.row(col) /= p;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col) continue;
      const CScalar f = work(r, col);
      if (f == CScalar{}) continue;
      work.row(r) -= f * work.row(col);
      inv.row(r) -= f * inv.row(col);
    }
  }
  return DenseOperator(std::move(inv));
}

DenseOperator partial_trace_first(const DenseOperator& a, std::size_t first_dim) {
  if (first_dim == 0 || a.dim() % first_dim != 0) {
    std::ostringstream os;
    os << "partial_trace_first: dimension " << a.dim() << " not divisible by " << first_dim;
    throw ArgumentError(os.str());
  }
  const std::size_t rest = a.dim() / first_dim;
  Matrix out = Matrix::Zero(rest, rest);
  for (std::size_t i = 0; i < first_dim; ++i) {
    out += a.matrix().block(i * rest, i * rest, rest, rest);
  }
  return DenseOperator(std::move(out));
}

double residual(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "residual");
  const double diff = (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
  return diff / (1.0 + std::max(a.max_abs(), b.max_abs()));
}

std::vector<CScalar> eigenvalues(const DenseOperator& a) {
  std::vector<CScalar> out;
  out.reserve(a.dim());
  if (a.is_hermitian(1e-12)) {
    // Symmetrise so the solver sees an exactly Hermitian input.
    const Matrix h = 0.5 * (a.matrix() + a.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigenvalues: self-adjoint solver did not converge (dim " << a.dim()
         << ", max sweeps " << Eigen::SelfAdjointEigenSolver<Matrix>::m_maxIterations << "*n)";
      throw NumericalError(os.str());
    }
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
      out.emplace_back(solver.eigenvalues()(k), 0.0);
    }
  } else {
    Eigen::ComplexEigenSolver<Matrix> solver;
    solver.compute(a.matrix(), false);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigenvalues: complex Schur iteration did not converge (dim " << a.dim()
         << ", max iterations " << solver.getMaxIterations() << ")";
      throw NumericalError(os.str());
    }
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
      out.push_back(solver.eigenvalues()(k));
    }
  }
  std::sort(out.begin(), out.end(), [](const CScalar& x, const CScalar& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

Eigen::VectorXcd apply_to_basis(const DenseOperator& op, std::size_t index) {
  if (index >= op.dim()) throw ArgumentError("apply_to_basis: index out of range");
  return op.matrix().col(static_cast<Eigen::Index>(index));
}

}  // namespace loopbraid
