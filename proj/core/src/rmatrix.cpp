#include "loopbraid/rmatrix.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include "loopbraid/chain.hpp"
#include "loopbraid/errors.hpp"

namespace loopbraid {

namespace {

// sum_k (k == 0 ? constant : 0) + poly_k * op, as an operator polynomial.
std::vector<Matrix> add_scaled(std::vector<Matrix> acc, const SpectralPolynomial& p, const Matrix& op) {
  const auto& c = p.coeffs();
  if (acc.size() < c.size()) acc.resize(c.size(), Matrix::Zero(op.rows(), op.cols()));
  for (std::size_t k = 0; k < c.size(); ++k) acc[k] += c[k] * op;
  return acc;
}

OperatorPolynomial to_polynomial(std::vector<Matrix> coeffs) {
  std::vector<DenseOperator> ops;
  ops.reserve(coeffs.size());
  for (auto& m : coeffs) ops.emplace_back(std::move(m));
  return OperatorPolynomial(std::move(ops)).trimmed();
}

OperatorPolynomial build_polynomial(Ansatz ansatz, const std::optional<RepresentationParams>& params,
                                    const std::optional<DenseOperator>& b4, const SpectralPolynomial& a,
                                    const SpectralPolynomial& b, CScalar c) {
  const Matrix s = permutation_op().matrix();
  const Matrix id = Matrix::Identity(4, 4);
  switch (ansatz) {
    case Ansatz::Rational:
      return to_polynomial({c * s, id});
    case Ansatz::A1: {
      const Matrix sigma = s + params->alpha * b4->matrix();
      return to_polynomial(add_scaled({s}, a, sigma));
    }
    case Ansatz::A2: {
      const Matrix sigma = s + params->alpha * b4->matrix();
      const Matrix s_sigma = s * sigma;
      // s B = B, so s sigma = 1 + alpha B.
      const DenseOperator expected(id + params->alpha * b4->matrix());
      const double r = residual(DenseOperator(s_sigma), expected);
      if (r > 1e-12) {
        std::ostringstream os;
        os << "A2: s*sigma differs from 1 + alpha B by " << r;
        throw NumericalError(os.str());
      }
      return to_polynomial(add_scaled({id}, a, s_sigma));
    }
    case Ansatz::A3:
      return to_polynomial(add_scaled(add_scaled({id}, a, s), b, b4->matrix()));
  }
  throw ArgumentError("RMatrixSpec: unknown ansatz");
}

std::string format_poly(const SpectralPolynomial& p) {
  std::ostringstream os;
  os << "[";
  for (std::size_t k = 0; k < p.coeffs().size(); ++k) {
    if (k) os << ",";
    const auto z = p.coeffs()[k];
    os << z.real();
    if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  }
  os << "]";
  return os.str();
}

}  // namespace

std::string_view to_string(Ansatz a) {
  switch (a) {
    case Ansatz::A1: return "a1";
    case Ansatz::A2: return "a2";
    case Ansatz::A3: return "a3";
    case Ansatz::Rational: return "rational";
  }
  return "?";
}

RMatrixSpec::RMatrixSpec(Ansatz ansatz, std::optional<RepresentationParams> params, SpectralPolynomial a,
                         SpectralPolynomial b, CScalar c)
    : ansatz_(ansatz),
      params_(std::move(params)),
      a_(std::move(a)),
      b_(std::move(b)),
      c_(c),
      b_matrix_(params_ ? std::optional<DenseOperator>(build_B(params_->b_choice)) : std::nullopt),
      poly_(build_polynomial(ansatz_, params_, b_matrix_, a_, b_, c_)) {}

RMatrixSpec RMatrixSpec::rational(CScalar c) {
  return RMatrixSpec(Ansatz::Rational, std::nullopt, {}, {}, c);
}

RMatrixSpec RMatrixSpec::a1(RepresentationParams params, SpectralPolynomial a) {
  return RMatrixSpec(Ansatz::A1, std::move(params), std::move(a), {}, {});
}

RMatrixSpec RMatrixSpec::a2(RepresentationParams params, SpectralPolynomial a) {
  return RMatrixSpec(Ansatz::A2, std::move(params), std::move(a), {}, {});
}

RMatrixSpec RMatrixSpec::a3(RepresentationParams params, SpectralPolynomial a, SpectralPolynomial b) {
  return RMatrixSpec(Ansatz::A3, std::move(params), std::move(a), std::move(b), {});
}

RMatrixSpec RMatrixSpec::a3_integrable(RepresentationParams params) {
  const CScalar alpha = params.alpha;
  return a3(std::move(params), SpectralPolynomial::linear(alpha), SpectralPolynomial::linear(-2.0 * alpha));
}

std::string RMatrixSpec::describe() const {
  std::ostringstream os;
  os << to_string(ansatz_);
  if (ansatz_ == Ansatz::Rational) {
    os << "(c=" << c_.real();
    if (c_.imag() != 0.0) os << (c_.imag() < 0 ? "" : "+") << c_.imag() << "i";
    os << ")";
    return os.str();
  }
  os << "(alpha=" << params_->alpha.real();
  if (params_->alpha.imag() != 0.0) os << (params_->alpha.imag() < 0 ? "" : "+") << params_->alpha.imag() << "i";
  os << ", B=" << loopbraid::describe(params_->b_choice) << ", a=" << format_poly(a_);
  if (ansatz_ == Ansatz::A3) os << ", b=" << format_poly(b_);
  os << ")";
  return os.str();
}

DenseOperator build_R(const RMatrixSpec& spec, CScalar u) { return spec.polynomial().eval(u); }

DenseOperator build_R_derivative(const RMatrixSpec& spec, CScalar u) {
  return spec.polynomial().derivative().eval(u);
}

RFunction r_function(const RMatrixSpec& spec) {
  return [poly = spec.polynomial()](CScalar u) { return poly.eval(u); };
}

std::string_view to_string(YbeForm f) {
  switch (f) {
    case YbeForm::Braided: return "braided";
    case YbeForm::Standard: return "standard";
    case YbeForm::Difference: return "difference";
  }
  return "?";
}

std::string_view convention_string(YbeForm f) {
  switch (f) {
    case YbeForm::Braided: return "braided: R12(u-v) R23(u) R12(v) = R23(v) R12(u) R23(u-v)";
    case YbeForm::Standard: return "standard: R12(u) R13(u+v) R23(v) = R23(v) R13(u+v) R12(u)";
    case YbeForm::Difference: return "difference: R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v)";
  }
  return "?";
}

double ybe_residual(const RFunction& r, YbeForm form, CScalar u, CScalar v) {
  auto at = [&](CScalar x, int a, int b) { return embed_pair(r(x), a, b, 3); };
  switch (form) {
    case YbeForm::Braided:
      return residual(at(u - v, 1, 2) * at(u, 2, 3) * at(v, 1, 2),
                      at(v, 2, 3) * at(u, 1, 2) * at(u - v, 2, 3));
    case YbeForm::Standard:
      return residual(at(u, 1, 2) * at(u + v, 1, 3) * at(v, 2, 3),
                      at(v, 2, 3) * at(u + v, 1, 3) * at(u, 1, 2));
    case YbeForm::Difference:
      return residual(at(u - v, 1, 2) * at(u, 1, 3) * at(v, 2, 3),
                      at(v, 2, 3) * at(u, 1, 3) * at(u - v, 1, 2));
  }
  throw ArgumentError("ybe_residual: unknown form");
}

double ybe_residual(const RMatrixSpec& spec, YbeForm form, CScalar u, CScalar v) {
  return ybe_residual(r_function(spec), form, u, v);
}

double ybe_residual_free_coeffs(const DenseOperator& s4, const DenseOperator& sigma4, CScalar a1,
                                CScalar a2, CScalar a3) {
  auto r = [&](CScalar a) { return s4 + a * sigma4; };
  auto e = [](const DenseOperator& op, int leg) { return embed_pair(op, leg, leg + 1, 3); };
  return residual(e(r(a1), 1) * e(r(a2), 2) * e(r(a3), 1), e(r(a3), 2) * e(r(a2), 1) * e(r(a1), 2));
}

double ybe_residual_free_coeffs(const RMatrixSpec& spec, CScalar a1, CScalar a2, CScalar a3) {
  if (spec.ansatz() != Ansatz::A1) {
    throw ArgumentError("ybe_residual_free_coeffs: only defined for the A1 ansatz");
  }
  const auto s = permutation_op();
  return ybe_residual_free_coeffs(s, s + spec.params()->alpha * *spec.b_matrix(), a1, a2, a3);
}

double rtt_residual(const RMatrixSpec& r_spec, const MonodromyBuilder& t_builder, CScalar u, CScalar v,
                    std::size_t max_dim) {
  const DenseOperator tu = t_builder(u);
  const DenseOperator tv = t_builder(v);
  if (tu.dim() != tv.dim() || tu.dim() < 2 || (tu.dim() & (tu.dim() - 1)) != 0) {
    throw ArgumentError("rtt_residual: monodromy must act on 2^(1+M) dimensions");
  }
  int chain_legs = 0;
  while ((std::size_t{2} << chain_legs) < tu.dim()) ++chain_legs;
  const int n_legs = chain_legs + 2;
  if ((std::size_t{1} << n_legs) > max_dim) {
    std::ostringstream os;
    os << "rtt_residual: space V1 (x) V2 (x) H of dimension " << (std::size_t{1} << n_legs)
       << " exceeds cap " << max_dim;
    throw SizeError(os.str());
  }
  std::vector<int> legs1(chain_legs + 1);
  std::vector<int> legs2(chain_legs + 1);
  legs1[0] = 1;
  legs2[0] = 2;
  for (int q = 0; q < chain_legs; ++q) legs1[q + 1] = legs2[q + 1] = q + 3;

  const auto t1 = embed_legs(tu, legs1, n_legs, max_dim);
  const auto t2 = embed_legs(tv, legs2, n_legs, max_dim);
  const auto r12 = embed_pair(build_R(r_spec, u - v), 1, 2, n_legs, max_dim);
  return residual(r12 * t1 * t2, t2 * t1 * r12);
}

DenseOperator monodromy_block(const DenseOperator& t, int i, int j) {
  if (i < 1 || i > 2 || j < 1 || j > 2) throw ArgumentError("monodromy_block: indices must be 1 or 2");
  if (t.dim() % 2 != 0) throw ArgumentError("monodromy_block: odd dimension");
  const auto half = static_cast<Eigen::Index>(t.dim() / 2);
  return DenseOperator(t.matrix().block((i - 1) * half, (j - 1) * half, half, half));
}

double abcd_residual(const RMatrixSpec& spec, int n_sites, CScalar u, CScalar v, int i, int j, int k, int l) {
  if (spec.ansatz() != Ansatz::Rational) {
    throw ArgumentError("abcd_residual: the ABCD relation is stated for the rational R-matrix");
  }
  if (u == v) throw ArgumentError("abcd_residual: u = v is a pole of c/(u-v)");
  const auto tu = monodromy(spec, u, n_sites);
  const auto tv = monodromy(spec, v, n_sites);
  const auto lhs = commutator(monodromy_block(tu, i, j), monodromy_block(tv, k, l));
  const auto rhs = (spec.c() / (u - v)) * (monodromy_block(tv, k, j) * monodromy_block(tu, i, l) -
                                           monodromy_block(tu, k, j) * monodromy_block(tv, i, l));
  return residual(lhs, rhs);
}

AuxTraceResult aux_trace_check(const RMatrixSpec& spec, CScalar u) {
  // R_{k+1,0} on ordered legs (0, k+1) is s R s; trace the leading leg.
  const auto s = permutation_op();
  const auto reversed = s * build_R(spec, u) * s;
  auto tr = partial_trace_first(reversed, 2);
  const CScalar lambda = tr.trace() / 2.0;
  const double r = residual(tr, lambda * DenseOperator::identity(2));
  return {r <= kAuxTraceTolerance, lambda, r, std::move(tr)};
}

}  // namespace loopbraid
