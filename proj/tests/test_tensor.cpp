#include <doctest.h>

#include <random>

#include "loopbraid/errors.hpp"
#include "loopbraid/reps.hpp"
#include "loopbraid/tensor.hpp"
#include "oracles.hpp"

using namespace loopbraid;
namespace o = oracle;

namespace {

DenseOperator op(const o::M& m) { return DenseOperator(m); }

}  // namespace

TEST_SUITE("tensor_core") {

TEST_CASE("kron examples") {
  CHECK(residual(kron(DenseOperator::identity(2), DenseOperator::identity(2)), DenseOperator::identity(4)) == 0.0);
  const auto zz = kron(pauli(Pauli::Z), pauli(Pauli::Z));
  CHECK(residual(zz, DenseOperator::diagonal({1, -1, -1, 1})) == 0.0);
  const auto xx = kron(pauli(Pauli::X), pauli(Pauli::X));
  const auto v = apply_to_basis(xx, 0b00);
  CHECK(v(3) == CScalar(1.0));
  CHECK(v.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("kron matches the index formula and is associative") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const auto a = o::random_matrix(rng, 2), b = o::random_matrix(rng, 4), c = o::random_matrix(rng, 2);
    CHECK(o::residual(kron(op(a), op(b)), o::kron(a, b)) == 0.0);
    const auto left = kron(kron(op(a), op(b)), op(c));
    const auto right = kron(op(a), kron(op(b), op(c)));
    CHECK(residual(left, right) <= 1e-15);
  }
}

TEST_CASE("kron respects the dimension cap") {
  CHECK_THROWS_AS(kron(DenseOperator::identity(64), DenseOperator::identity(64), 1024), SizeError);
}

TEST_CASE("embed_pair examples") {
  const auto s = permutation_op();
  CHECK(o::residual(embed_pair(s, 1, 2, 2), o::swap4()) == 0.0);
  const auto outer = embed_pair(s, 1, 3, 3);
  const auto v = apply_to_basis(outer, 0b100);
  CHECK(v(0b001) == CScalar(1.0));
  CHECK(v.cwiseAbs().sum() == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  const auto m = o::random_matrix(rng, 4);
  CHECK(residual(embed_pair(op(m), 2, 1, 2), s * embed_pair(op(m), 1, 2, 2) * s) <= 1e-15);
}

TEST_CASE("embed_pair agrees with the basis-permutation oracle") {
  std::mt19937_64 rng(5);
  for (int n = 2; n <= 5; ++n) {
    for (int a = 1; a <= n; ++a) {
      for (int b = 1; b <= n; ++b) {
        if (a == b) continue;
        const auto m = o::random_matrix(rng, 4);
        CHECK(o::residual(embed_pair(op(m), a, b, n), o::embed(m, a, b, n)) == 0.0);
      }
    }
  }
}

TEST_CASE("embed_pair leg-order law") {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto m = op(o::random_matrix(rng, 4));
    const int n = 4;
    const int i = 1 + t % 3, j = 4 - t % 2;
    if (i == j) continue;
    const auto sw = embed_pair(permutation_op(), i, j, n);
    CHECK(residual(embed_pair(m, j, i, n), sw * embed_pair(m, i, j, n) * sw) <= 1e-14);
  }
}

TEST_CASE("embed_pair argument errors") {
  const auto s = permutation_op();
  CHECK_THROWS_AS(embed_pair(s, 1, 1, 3), ArgumentError);
  CHECK_THROWS_AS(embed_pair(s, 0, 2, 3), ArgumentError);
  CHECK_THROWS_AS(embed_pair(s, 1, 4, 3), ArgumentError);
  CHECK_THROWS_AS(embed_pair(DenseOperator::identity(2), 1, 2, 3), ArgumentError);
  CHECK_THROWS_AS(embed_pair(s, 1, 2, 20), SizeError);
}

TEST_CASE("apply_pair equals embed then multiply") {
  std::mt19937_64 rng(13);
  const int n = 4;
  const auto m = op(o::random_matrix(rng, 16));
  for (auto [a, b] : {std::pair{1, 2}, {3, 1}, {2, 4}, {4, 3}}) {
    const auto r = op(o::random_matrix(rng, 4));
    CHECK(residual(apply_pair(r, a, b, m), embed_pair(r, a, b, n) * m) <= 1e-15);
  }
}

TEST_CASE("embed_legs scatters a multi-leg operator") {
  std::mt19937_64 rng(21);
  const auto a = o::random_matrix(rng, 2), b = o::random_matrix(rng, 2), c = o::random_matrix(rng, 2);
  const auto abc = op(o::kron(o::kron(a, b), c));
  const std::vector<int> legs{4, 1, 3};
  // a on leg 4, b on leg 1, c on leg 3, identity on leg 2.
  const auto expect = o::kron(o::kron(o::kron(b, o::id(2)), c), a);
  CHECK(o::residual(embed_legs(abc, legs, 4), expect) <= 1e-15);
}

TEST_CASE("matmul examples") {
  std::mt19937_64 rng(2);
  const auto m = op(o::random_matrix(rng, 4));
  CHECK(residual(matmul(DenseOperator::identity(4), m), m) == 0.0);
  const auto s = permutation_op();
  CHECK(residual(matmul(s, s), DenseOperator::identity(4)) <= 1e-16);
  CHECK(residual(matmul(pauli(Pauli::X), pauli(Pauli::Y)), CScalar(0, 1) * pauli(Pauli::Z)) == 0.0);
  CHECK_THROWS_AS(matmul(DenseOperator::identity(2), DenseOperator::identity(4)), ArgumentError);
}

TEST_CASE("inverse examples") {
  CHECK(residual(inverse(2.0 * DenseOperator::identity(4)), 0.5 * DenseOperator::identity(4)) == 0.0);
  const auto s = permutation_op();
  const auto r = 2.0 * DenseOperator::identity(4) + s;
  const auto expect = (1.0 / 3.0) * (2.0 * DenseOperator::identity(4) - s);
  CHECK(residual(inverse(r), expect) <= 1e-15);
  CHECK(residual(r * inverse(r), DenseOperator::identity(4)) <= 1e-15);
  CHECK_THROWS_AS(inverse(DenseOperator::zeros(4)), SingularMatrixError);
  CHECK_THROWS_AS(inverse(DenseOperator::diagonal({1, 1e-14})), SingularMatrixError);
}

TEST_CASE("inverse round-trip against an LU oracle") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    const o::M a = o::random_matrix(rng, 8) + 4.0 * o::id(8);
    const auto inv = inverse(op(a));
    CHECK(residual(op(a) * inv, DenseOperator::identity(8)) <= 1e-11);
    CHECK(o::residual(inv, a.fullPivLu().inverse()) <= 1e-12);
  }
}

TEST_CASE("partial_trace_first examples") {
  std::mt19937_64 rng(4);
  const auto a = o::random_matrix(rng, 2), b = o::random_matrix(rng, 4);
  CHECK(o::residual(partial_trace_first(op(o::kron(a, b)), 2), a.trace() * b) <= 1e-15);
  CHECK(residual(partial_trace_first(permutation_op(), 2), DenseOperator::identity(2)) == 0.0);
  CHECK(residual(partial_trace_first(DenseOperator::identity(8), 2), 2.0 * DenseOperator::identity(4)) == 0.0);
  CHECK_THROWS_AS(partial_trace_first(DenseOperator::identity(6), 4), ArgumentError);
}

TEST_CASE("partial_trace_first linearity and factorization") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto x = o::random_matrix(rng, 16), y = o::random_matrix(rng, 16);
    const CScalar k = o::random_complex(rng);
    CHECK(o::residual(partial_trace_first(op(x), 2), o::partial_trace_first(x, 2)) <= 1e-15);
    CHECK(residual(partial_trace_first(op(x + k * y), 4),
                   partial_trace_first(op(x), 4) + k * partial_trace_first(op(y), 4)) <= 1e-13);
    const auto a = o::random_matrix(rng, 4), b = o::random_matrix(rng, 2);
    CHECK(std::abs(op(o::kron(a, b)).trace() - a.trace() * b.trace()) / (1 + std::abs(a.trace() * b.trace())) <=
          1e-13);
  }
}

TEST_CASE("residual examples") {
  std::mt19937_64 rng(1);
  const auto m = op(o::random_matrix(rng, 4));
  CHECK(residual(m, m) == 0.0);
  CHECK(residual(DenseOperator::identity(2), 2.0 * DenseOperator::identity(2)) == doctest::Approx(1.0 / 3.0));
  // X - Y has max entry |1 - (-i)| = |1 + i| = sqrt(2); both norms are 1.
  CHECK(residual(pauli(Pauli::X), pauli(Pauli::Y)) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK_THROWS_AS(residual(DenseOperator::identity(2), DenseOperator::identity(4)), ArgumentError);
}

TEST_CASE("eigenvalues examples") {
  auto close = [](const std::vector<CScalar>& got, std::vector<double> want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t k = 0; k < got.size(); ++k) CHECK(std::abs(got[k] - want[k]) <= 1e-12);
  };
  close(eigenvalues(pauli(Pauli::Z)), {-1, 1});
  close(eigenvalues(permutation_op()), {-1, 1, 1, 1});
  const auto x = pauli(Pauli::X), y = pauli(Pauli::Y), z = pauli(Pauli::Z);
  close(eigenvalues(kron(x, x) + kron(y, y) + kron(z, z)), {-3, 1, 1, 1});
}

TEST_CASE("eigenvalues of a non-Hermitian matrix are sorted and sum to the trace") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 5; ++t) {
    const auto a = o::random_matrix(rng, 16);
    const auto ev = eigenvalues(op(a));
    REQUIRE(ev.size() == 16);
    for (std::size_t k = 1; k < ev.size(); ++k) {
      CHECK((ev[k - 1].real() < ev[k].real() ||
             (ev[k - 1].real() == ev[k].real() && ev[k - 1].imag() <= ev[k].imag())));
    }
    CScalar sum{};
    for (auto e : ev) sum += e;
    CHECK(std::abs(sum - a.trace()) / (1.0 + std::abs(a.trace())) <= 1e-10);
  }
}

TEST_CASE("DenseOperator rejects malformed input") {
  CHECK_THROWS_AS(DenseOperator(Matrix(2, 3)), ArgumentError);
  CHECK_THROWS_AS(DenseOperator(Matrix(0, 0)), ArgumentError);
  Matrix bad = Matrix::Identity(2, 2);
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DenseOperator{bad}, ArgumentError);
  CHECK_THROWS_AS(ChainGeometry(0), ArgumentError);
}

TEST_CASE("ChainGeometry wraps periodically") {
  const ChainGeometry g(4);
  CHECK(g.dim() == 16);
  CHECK(g.next(1) == 2);
  CHECK(g.next(4) == 1);
  CHECK_THROWS_AS(g.require(5, "test"), ArgumentError);
}

}  // TEST_SUITE
