#pragma once

// Presentation relations of the loop braid group family, checked on the full
// 2^N chain space.
//
//   B1  g_i g_{i+1} g_i = g_{i+1} g_i g_{i+1}
//   B2  g_i g_j = g_j g_i                      |i-j| > 1
//   S1  s_i s_{i+1} s_i = s_{i+1} s_i s_{i+1}
//   S2  s_i s_j = s_j s_i                      |i-j| > 1
//   S3  s_i^2 = 1
//   M1  g_i s_j = s_j g_i                      |i-j| > 1
//   M2  s_i s_{i+1} g_i = g_{i+1} s_i s_{i+1}
//   M3  g_i g_{i+1} s_i = s_{i+1} g_i g_{i+1}
//   M3P g_{i+1} g_i s_{i+1} = s_i g_{i+1} g_i
//   M4  g_i s_{i+1} g_i = g_{i+1} s_i g_{i+1}
//
// g = sigma.  M4 is extra structure used by the R-matrix ansatz and does not
// enter the classification.

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "loopbraid/reps.hpp"

namespace loopbraid {

enum class RelationId { B1, B2, S1, S2, S3, M1, M2, M3, M3P, M4 };

inline constexpr std::array<RelationId, 10> kAllRelations = {
    RelationId::B1, RelationId::B2, RelationId::S1, RelationId::S2,  RelationId::S3,
    RelationId::M1, RelationId::M2, RelationId::M3, RelationId::M3P, RelationId::M4};

std::string_view to_string(RelationId id);
/// Minimal chain length at which the relation has an admissible index.
int min_sites(RelationId id);

inline constexpr double kRelationTolerance = 1e-11;

struct IndexResidual {
  int i;
  int j;  // second index for far-commutation relations, else 0
  double residual;
};

struct RelationResult {
  RelationId id;
  double residual;  // max over per_index
  double tolerance;
  bool pass;
  std::vector<IndexResidual> per_index;
};

/// Throws ArgumentError if the chain is shorter than min_sites(rel).
RelationResult check_relation(const GeneratorFamily& fam, RelationId rel,
                              double tol = kRelationTolerance);

/// M2 read backwards: s_{i+1} s_i g_{i+1} = g_i s_{i+1} s_i.
RelationResult check_m2_reversed(const GeneratorFamily& fam, double tol = kRelationTolerance);

enum class GroupClass {
  SymmetricLoopBraid,  // M3 and M3P
  LoopBraid,           // M3 only
  OppositeLoopBraid,   // M3P only
  VirtualBraid,        // neither
  None,                // a braid or M1/M2 relation fails
  NotMotionGroup,      // permutation relations fail
};

std::string_view to_string(GroupClass c);

struct RelationReport {
  int n_sites;
  std::vector<RelationResult> results;  // kAllRelations order
  RelationResult m2_reversed;
  /// max(residual(g g^{-1}, 1), residual(g^{-1} g, 1)) when an inverse is known.
  std::optional<double> sigma_inverse_residual;
  GroupClass classification;
  bool m4_pass;

  const RelationResult& at(RelationId id) const;
};

/// Requires N >= 4.  Checks run concurrently; the report order is fixed.
RelationReport classify(const GeneratorFamily& fam, double tol = kRelationTolerance);

}  // namespace loopbraid
