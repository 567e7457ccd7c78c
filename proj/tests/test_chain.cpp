#include <doctest.h>

#include <random>

#include "loopbraid/chain.hpp"
#include "loopbraid/errors.hpp"
#include "oracles.hpp"

using namespace loopbraid;
namespace o = oracle;

namespace {

o::M xxz_oracle() {
  return o::kron(o::pauli_x(), o::pauli_x()) + o::kron(o::pauli_y(), o::pauli_y()) -
         o::kron(o::pauli_z(), o::pauli_z());
}

const BChoice kModel2 = bchoice::ZZHalf{};

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("rational transfer at u = 0 is the cyclic shift") {
  const auto spec = RMatrixSpec::rational(1.0);
  for (int n = 2; n <= 5; ++n) {
    const auto t = transfer(spec, 0.0, n);
    CHECK(o::residual(t, o::swap_transfer_by_chase(n)) == 0.0);
  }
  // Site k+1 receives site k.
  const auto u3 = translation_operator(3);
  CHECK(apply_to_basis(u3, 0b100)(0b010) == CScalar(1.0));
  CHECK(apply_to_basis(u3, 0b001)(0b100) == CScalar(1.0));
}

TEST_CASE("transfer is the sum of the diagonal monodromy blocks") {
  std::mt19937_64 rng(71);
  const auto spec = RMatrixSpec::rational(o::random_complex(rng));
  const CScalar u = o::random_complex(rng);
  const auto t = monodromy(spec, u, 3);
  CHECK(residual(transfer(spec, u, 3), monodromy_block(t, 1, 1) + monodromy_block(t, 2, 2)) <= 1e-15);
  CHECK(o::residual(transfer(spec, u, 3), o::partial_trace_first(t.matrix(), 2)) <= 1e-15);
}

TEST_CASE("A3 transfer at u = 0 is twice the identity") {
  const auto spec = RMatrixSpec::a3_integrable({0.4, kModel2});
  CHECK(residual(transfer(spec, 0.0, 4), 2.0 * DenseOperator::identity(16)) == 0.0);
}

TEST_CASE("monodromy size cap and argument checks") {
  const auto spec = RMatrixSpec::rational(1.0);
  CHECK_THROWS_AS(monodromy(spec, 0.1, 6, 64), SizeError);
  CHECK_THROWS_AS(monodromy(spec, 0.1, 0), ArgumentError);
}

TEST_CASE("transfer matrices commute for Yang-Baxter specs") {
  std::mt19937_64 rng(72);
  const auto rational = RMatrixSpec::rational({1.0, 0.3});
  const auto a2 = RMatrixSpec::a2({0.7, kModel2}, SpectralPolynomial({0.1, 1.0}));
  for (int n = 3; n <= 5; ++n) {
    const CScalar u = o::random_complex(rng), v = o::random_complex(rng);
    CHECK(transfer_commutator(rational, u, v, n) <= 1e-9);
    CHECK(transfer_commutator(a2, u, v, n) <= 1e-9);
  }
  SUBCASE("commutator_residual examples") {
    CHECK(commutator_residual(pauli(Pauli::X), pauli(Pauli::Z)) == doctest::Approx(2.0));
    CHECK(commutator_residual(DenseOperator::zeros(2), pauli(Pauli::Z)) == 0.0);
  }
  SUBCASE("A3 with a product projector") {
    const auto a3 = RMatrixSpec::a3_integrable({0.9, bchoice::ProductProjector{{0.3, 0.0, 0.4}}});
    CHECK(transfer_commutator(a3, 1.5, -1.5, 4) > 1e-2);
  }
}

TEST_CASE("transfer commutes with translation") {
  std::mt19937_64 rng(73);
  const auto spec = RMatrixSpec::a3_integrable({0.5, bchoice::ProductProjector{{0.0, 0.3, 0.4}}});
  const auto u4 = translation_operator(4);
  const auto t = transfer(spec, o::random_complex(rng), 4);
  CHECK(commutator_residual(t, u4) <= 1e-13);
}

TEST_CASE("charges of the rational chain") {
  const auto spec = RMatrixSpec::rational(1.0);
  for (int n = 2; n <= 4; ++n) {
    const auto fam = extract_charges(spec, 0.5, n);
    REQUIRE(fam.charges.size() == static_cast<std::size_t>(n + 1));
    CHECK(residual(fam.charges.back(), 2.0 * DenseOperator::identity(std::size_t{1} << n)) <= 1e-9);
    CHECK(fam.pass());
    CHECK(fam.max_commutator <= 1e-9);
    CHECK(residual(fam.charges.front(), transfer(spec, 0.5, n)) <= 1e-10);
  }
}

TEST_CASE("charges reproduce the transfer matrix away from the nodes") {
  std::mt19937_64 rng(74);
  const auto spec = RMatrixSpec::a2({{0.3, 0.2}, kModel2}, SpectralPolynomial::linear(1.0));
  const CScalar u0 = 0.2;
  const auto fam = extract_charges(spec, u0, 3);
  CHECK(fam.pass());
  const CScalar u = u0 + o::random_complex(rng, 0.5);
  DenseOperator sum = DenseOperator::zeros(8);
  CScalar power = 1.0;
  for (const auto& q : fam.charges) {
    sum = sum + power * q;
    power *= u - u0;
  }
  CHECK(residual(sum, transfer(spec, u, 3)) <= 1e-10);
}

TEST_CASE("XXX Hamiltonian from the rational R-matrix") {
  for (const CScalar c : {CScalar(1.0), CScalar(2.0), CScalar(0.5, 0.5)}) {
    for (int n : {3, 4}) {
      const auto spec = RMatrixSpec::rational(c);
      const auto h = local_hamiltonian(spec, c / 2.0, n);
      CHECK(o::residual(h, (2.0 / (3.0 * c)) * o::heisenberg(n)) <= 1e-12);
      CHECK(residual(xxx_hamiltonian(c, n), h) <= 1e-12);
      const auto bundle = hamiltonian_bundle(spec, c / 2.0, n);
      CHECK(bundle.closed_form_name == "xxx");
      REQUIRE(bundle.discrepancy_residual.has_value());
      CHECK(*bundle.discrepancy_residual <= 1e-12);
    }
  }
}

TEST_CASE("XXX spectrum at N = 2") {
  const auto sp = spectrum(xxx_hamiltonian(1.0, 2));
  CHECK(sp.hermitian);
  const std::vector<double> want{-4.0, 4.0 / 3, 4.0 / 3, 4.0 / 3};
  REQUIRE(sp.eigenvalues.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(sp.eigenvalues[k] - want[k]) <= 1e-12);
}

TEST_CASE("local Hamiltonian is translation invariant and matches the bond oracle") {
  std::mt19937_64 rng(75);
  const auto spec = RMatrixSpec::a3_integrable({0.4, bchoice::ProductProjector{{0.3, 0.0, 0.4}}});
  const CScalar u = 0.35;
  const o::M r = build_R(spec, u).matrix();
  const o::M bond = build_R_derivative(spec, u).matrix() * r.inverse();
  for (int n : {3, 4}) {
    const auto h = local_hamiltonian(spec, u, n);
    CHECK(o::residual(h, o::bond_sum(bond, n)) <= 1e-13);
    CHECK(commutator_residual(h, translation_operator(n)) <= 1e-13);
  }
}

TEST_CASE("A2 at alpha = 0 gives a scalar Hamiltonian") {
  const auto spec = RMatrixSpec::a2({0.0, kModel2}, SpectralPolynomial::linear(1.0));
  const CScalar u = 0.3;
  const auto h = local_hamiltonian(spec, u, 3);
  CHECK(residual(h, (3.0 / (1.0 + u)) * DenseOperator::identity(8)) <= 1e-14);
}

TEST_CASE("closed-form SLB Hamiltonian equals the derived one") {
  std::mt19937_64 rng(76);
  for (int t = 0; t < 10; ++t) {
    const CScalar alpha = o::random_complex(rng), u = o::random_complex(rng, 0.5);
    const auto [l, m, n] = o::random_projector_params(rng, true);
    const BChoice b = t % 2 ? kModel2 : BChoice{bchoice::ProductProjector{{l, m, n}}};
    const SpectralPolynomial a({o::random_complex(rng, 0.3), 1.0, o::random_complex(rng, 0.3)});
    const auto spec = RMatrixSpec::a2({alpha, b}, a);
    const auto closed = closed_form_slb(a, alpha, *spec.b_matrix(), u, 4);
    CHECK(residual(closed, local_hamiltonian(spec, u, 4)) <= 1e-11);
    const auto bundle = hamiltonian_bundle(spec, u, 4);
    CHECK(bundle.closed_form_name == "slb");
  }
  CHECK_THROWS_AS(closed_form_slb(SpectralPolynomial::linear(1.0), 0.5, build_B(kModel2), -1.0, 3), PoleError);
}

TEST_CASE("derivative route agrees only at the regular point") {
  const auto spec = RMatrixSpec::rational(1.0);
  const auto at_zero = compare_derivative_routes(spec, 0.0, 4);
  CHECK(at_zero.regular_point);
  CHECK(at_zero.aux_trace_proportional);
  CHECK(at_zero.agrees());
  const auto at_half = compare_derivative_routes(spec, 0.5, 4);
  CHECK_FALSE(at_half.regular_point);
  CHECK_FALSE(at_half.agrees());
  CHECK(at_half.residual > 0.1);
  CHECK(residual(at_half.difference, at_half.via_derivative - at_half.local) <= 1e-15);
}

TEST_CASE("hamiltonian_via_derivative matches the cyclic-shift calculation") {
  // At u = 0, T = U and dT/du U^{-1} is the sum of swaps for c = 1.
  const auto spec = RMatrixSpec::rational(1.0);
  const auto h = hamiltonian_via_derivative(spec, 0.0, 3);
  CHECK(o::residual(h, o::bond_sum(o::swap4(), 3)) <= 1e-8);
}

TEST_CASE("closed_form_deformed examples") {
  const auto b = build_B(kModel2);
  CHECK(residual(closed_form_deformed_bond(0.4, b, 1.0), DenseOperator::identity(4)) <= 1e-15);
  const auto bundle = closed_form_deformed(0.4, kModel2, 1.0, 4);
  REQUIRE(bundle.closed_form.has_value());
  CHECK(residual(*bundle.closed_form, 4.0 * DenseOperator::identity(16)) <= 1e-14);
  CHECK_THROWS_AS(closed_form_deformed_bond(0.5, b, 2.0), PoleError);
  CHECK_THROWS_AS(closed_form_deformed(0.5, kModel2, -2.0, 3), PoleError);
}

TEST_CASE("deformed discrepancy equals the inverse sum") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 6; ++t) {
    const CScalar alpha = o::random_complex(rng), u = o::random_complex(rng, 0.5);
    const auto [l, m, n] = o::random_projector_params(rng, false);
    const BChoice b = t % 2 ? kModel2 : BChoice{bchoice::ProductProjector{{l, m, n}}};
    const auto bundle = closed_form_deformed(alpha, b, u, 4);
    REQUIRE(bundle.inverse_sum_hypothesis.has_value());
    CHECK(bundle.inverse_sum_hypothesis->holds());
    const auto spec = RMatrixSpec::a3_integrable({alpha, b});
    const o::M inv_bond = build_R(spec, u).matrix().inverse();
    CHECK(o::residual(*bundle.discrepancy, o::bond_sum(inv_bond, 4)) <= 1e-10);
  }
}

TEST_CASE("Model 2 bond structure") {
  const auto m = model2_structure(0.5, 0.0);
  CHECK(std::abs(m.predicted - 0.25) <= 1e-15);
  CHECK(std::abs(m.fitted - 0.25) <= 1e-15);
  std::mt19937_64 rng(78);
  for (int t = 0; t < 10; ++t) {
    const CScalar alpha = o::random_complex(rng), u = o::random_complex(rng, 0.5);
    const auto r = model2_structure(alpha, u);
    CHECK(r.residual <= 1e-12);
    CHECK(std::abs(r.fitted - r.predicted) <= 1e-12);
    const o::M bond = closed_form_deformed_bond(alpha, build_B(kModel2), u).matrix();
    const o::M traceless = bond - (bond.trace() / 4.0) * o::id(4);
    CHECK(o::residual(traceless, r.predicted * xxz_oracle()) <= 1e-12);
  }
}

TEST_CASE("Model 1 Pauli table") {
  std::mt19937_64 rng(79);
  const std::array<o::M, 4> basis{o::id(2), o::pauli_x(), o::pauli_y(), o::pauli_z()};
  for (int t = 0; t < 10; ++t) {
    const auto [l, m, n] = o::random_projector_params(rng, t % 2 == 0);
    const auto term = model1_term({l, m, n}, 0.3, 0.2);
    CHECK(term.table_residual <= 1e-15);
    o::M rebuilt = o::M::Zero(4, 4);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) rebuilt += term.expected[a][b] * o::kron(basis[a], basis[b]);
    const o::M p = o::projector(l, m, n);
    CHECK(o::residual(rebuilt, o::kron(p, p)) <= 1e-15);
  }
}

TEST_CASE("integrability diagnostic") {
  const std::vector<CScalar> samples{0.3, {0.1, 0.4}, -0.7};
  SUBCASE("rational at c/2") {
    const auto rep = integrability_diagnostic(RMatrixSpec::rational(1.0), 0.5, 4, samples);
    CHECK(rep.closed_form_name == "xxx");
    CHECK(rep.aux_trace_proportional);
    CHECK(rep.max_derived <= 1e-9);
    REQUIRE(rep.max_closed.has_value());
    CHECK(*rep.max_closed <= 1e-9);
    CHECK(rep.points.size() == samples.size());
  }
  SUBCASE("deformed model reports both candidates") {
    const auto rep = integrability_diagnostic(RMatrixSpec::a3_integrable({0.4, kModel2}), 0.3, 4, samples);
    CHECK(rep.closed_form_name == "deformed");
    REQUIRE(rep.max_closed.has_value());
    for (const auto& p : rep.points) CHECK(p.closed_residual.has_value());
  }
}

}  // TEST_SUITE
