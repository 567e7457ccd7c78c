#include "loopbraid/reps.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "loopbraid/errors.hpp"

namespace loopbraid {

namespace {

constexpr CScalar kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_complex(CScalar z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

}  // namespace

DenseOperator pauli(Pauli kind) {
  switch (kind) {
    case Pauli::I:
      return DenseOperator::identity(2);
    case Pauli::X:
      return DenseOperator::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    case Pauli::Y:
      return DenseOperator::from_rows({{0.0, -kI}, {kI, 0.0}});
    case Pauli::Z:
      return DenseOperator::diagonal({1.0, -1.0});
  }
  throw ArgumentError("pauli: unknown kind");
}

DenseOperator permutation_op() {
  const auto x = pauli(Pauli::X);
  const auto y = pauli(Pauli::Y);
  const auto z = pauli(Pauli::Z);
  return 0.5 * (DenseOperator::identity(4) + kron(x, x) + kron(y, y) + kron(z, z));
}

double ProjectorParams::constraint_residual() const {
  return std::abs(l * l + m * m + n * n - 0.25);
}

DenseOperator build_projector(const ProjectorParams& p) {
  const double r = p.constraint_residual();
  if (r > kProjectorTolerance) {
    std::ostringstream os;
    os << "build_projector: l^2 + m^2 + n^2 must equal 1/4 (residual " << r << ")";
    throw ArgumentError(os.str());
  }
  return 0.5 * pauli(Pauli::I) + p.l * pauli(Pauli::X) + p.m * pauli(Pauli::Y) +
         p.n * pauli(Pauli::Z);
}

std::string describe(const BChoice& choice) {
  return std::visit(
      overloaded{
          [](const bchoice::ProductProjector& pp) {
            return "product:" + format_complex(pp.params.l) + "," + format_complex(pp.params.m) +
                   "," + format_complex(pp.params.n);
          },
          [](const bchoice::ZZHalf&) { return std::string("zz-half"); },
          [](const bchoice::Custom&) { return std::string("custom"); },
      },
      choice);
}

std::vector<std::string> BValidation::failed() const {
  std::vector<std::string> out;
  if (!idempotence_ok()) out.emplace_back("idempotence (B^2 = B)");
  if (!neighbor_commutation_ok()) out.emplace_back("neighbor commutation (B_12 B_23 = B_23 B_12)");
  if (!swap_invariance_ok()) out.emplace_back("swap invariance (s B = B)");
  return out;
}

BValidation validate_B(const DenseOperator& b, int n_probe) {
  if (b.dim() != 4) throw ArgumentError("validate_B: B must be 4x4");
  if (n_probe < 3) throw ArgumentError("validate_B: n_probe must be >= 3");
  BValidation v;
  v.idempotence = residual(b * b, b);
  v.swap_invariance = residual(permutation_op() * b, b);
  double worst = 0.0;
  for (int i = 1; i + 2 <= n_probe; ++i) {
    const auto left = embed_pair(b, i, i + 1, n_probe);
    const auto right = embed_pair(b, i + 1, i + 2, n_probe);
    worst = std::max(worst, residual(left * right, right * left));
  }
  v.neighbor_commutation = worst;
  return v;
}

DenseOperator build_B(const BChoice& choice) {
  DenseOperator b = std::visit(
      overloaded{
          [](const bchoice::ProductProjector& pp) {
            const auto p = build_projector(pp.params);
            return kron(p, p);
          },
          [](const bchoice::ZZHalf&) {
            const auto z = pauli(Pauli::Z);
            return 0.5 * (DenseOperator::identity(4) + kron(z, z));
          },
          [](const bchoice::Custom& c) {
            if (c.matrix.dim() != 4) throw ArgumentError("build_B: custom B must be 4x4");
            return c.matrix;
          },
      },
      choice);
  const auto v = validate_B(b);
  if (!v.ok()) {
    std::ostringstream os;
    os << "build_B: " << describe(choice) << " fails";
    for (const auto& f : v.failed()) os << " [" << f << "]";
    throw ValidationError(os.str(), v.failed());
  }
  return b;
}

DenseOperator build_sigma(const RepresentationParams& params) {
  return permutation_op() + params.alpha * build_B(params.b_choice);
}

DenseOperator sigma_inverse(const RepresentationParams& params) {
  const CScalar denom = 1.0 + params.alpha;
  if (std::abs(denom) == 0.0) {
    throw ArgumentError("sigma_inverse: alpha = -1 makes sigma singular (factor alpha/(1+alpha))");
  }
  return permutation_op() - (params.alpha / denom) * build_B(params.b_choice);
}

DenseOperator sigma_power(const RepresentationParams& params, int k) {
  if (k < 0) throw ArgumentError("sigma_power: k must be >= 0");
  const auto b = build_B(params.b_choice);
  const CScalar factor = std::pow(1.0 + params.alpha, k) - 1.0;
  const DenseOperator base = (k % 2 == 1) ? permutation_op() : DenseOperator::identity(4);
  return base + factor * b;
}

PauliTable pauli_decompose(const DenseOperator& op4) {
  if (op4.dim() != 4) throw ArgumentError("pauli_decompose: operator must be 4x4");
  constexpr Pauli kinds[4] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  PauliTable table{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const auto basis = kron(pauli(kinds[a]), pauli(kinds[b]));
      table[a][b] = (basis * op4).trace() / 4.0;
    }
  }
  return table;
}

GeneratorFamily::GeneratorFamily(DenseOperator s4, DenseOperator sigma4,
                                 std::optional<DenseOperator> inv, ChainGeometry geometry)
    : s4_(std::move(s4)), sigma4_(std::move(sigma4)), sigma_inv4_(std::move(inv)), geometry_(geometry) {
  if (s4_.dim() != 4 || sigma4_.dim() != 4) throw ArgumentError("GeneratorFamily: generators must be 4x4");
  geometry_.require(2, "GeneratorFamily");
}

GeneratorFamily::GeneratorFamily(const RepresentationParams& params, ChainGeometry geometry)
    : GeneratorFamily(permutation_op(), build_sigma(params),
                      std::abs(1.0 + params.alpha) == 0.0
                          ? std::nullopt
                          : std::optional<DenseOperator>(sigma_inverse(params)),
                      geometry) {}

GeneratorFamily GeneratorFamily::from_local(DenseOperator s4, DenseOperator sigma4,
                                            ChainGeometry geometry) {
  return GeneratorFamily(std::move(s4), std::move(sigma4), std::nullopt, geometry);
}

DenseOperator GeneratorFamily::generator(Generator which, int i) const {
  if (i < 1 || i > geometry_.n_sites - 1) {
    std::ostringstream os;
    os << "generator index " << i << " out of range 1.." << geometry_.n_sites - 1;
    throw ArgumentError(os.str());
  }
  return embed_pair(local(which), i, i + 1, geometry_.n_sites);
}

DenseOperator family_generator(const GeneratorFamily& fam, Generator which, int i) {
  return fam.generator(which, i);
}

}  // namespace loopbraid
