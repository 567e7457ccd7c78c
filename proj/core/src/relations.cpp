#include "loopbraid/relations.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <future>
#include <sstream>

#include "loopbraid/errors.hpp"

namespace loopbraid {

std::string_view to_string(RelationId id) {
  switch (id) {
    case RelationId::B1: return "B1";
    case RelationId::B2: return "B2";
    case RelationId::S1: return "S1";
    case RelationId::S2: return "S2";
    case RelationId::S3: return "S3";
    case RelationId::M1: return "M1";
    case RelationId::M2: return "M2";
    case RelationId::M3: return "M3";
    case RelationId::M3P: return "M3P";
    case RelationId::M4: return "M4";
  }
  return "?";
}

int min_sites(RelationId id) {
  switch (id) {
    case RelationId::B2:
    case RelationId::S2:
    case RelationId::M1:
      return 4;
    case RelationId::S3:
      return 2;
    default:
      return 3;
  }
}

std::string_view to_string(GroupClass c) {
  switch (c) {
    case GroupClass::SymmetricLoopBraid: return "SLB";
    case GroupClass::LoopBraid: return "LB";
    case GroupClass::OppositeLoopBraid: return "OLB";
    case GroupClass::VirtualBraid: return "VB";
    case GroupClass::None: return "none";
    case GroupClass::NotMotionGroup: return "not a motion-group representation";
  }
  return "?";
}

namespace {

// Generators embedded once per family.
class GeneratorCache {
 public:
  explicit GeneratorCache(const GeneratorFamily& fam) : n_(fam.geometry().n_sites) {
    for (int i = 1; i < n_; ++i) {
      s_.push_back(fam.generator(Generator::S, i));
      g_.push_back(fam.generator(Generator::Sigma, i));
    }
  }
  int n() const { return n_; }
  const DenseOperator& s(int i) const { return s_[i - 1]; }
  const DenseOperator& g(int i) const { return g_[i - 1]; }

 private:
  int n_;
  std::vector<DenseOperator> s_;
  std::vector<DenseOperator> g_;
};

using Local = std::function<double(int)>;
using Far = std::function<double(int, int)>;

RelationResult over_adjacent(RelationId id, const GeneratorCache& c, double tol, const Local& f) {
  RelationResult r{id, 0.0, tol, true, {}};
  for (int i = 1; i + 1 <= c.n() - 1; ++i) {
    const double res = f(i);
    r.per_index.push_back({i, 0, res});
    r.residual = std::max(r.residual, res);
  }
  r.pass = r.residual <= tol;
  return r;
}

RelationResult over_far(RelationId id, const GeneratorCache& c, double tol, const Far& f) {
  RelationResult r{id, 0.0, tol, true, {}};
  for (int i = 1; i <= c.n() - 1; ++i) {
    for (int j = 1; j <= c.n() - 1; ++j) {
      if (std::abs(i - j) <= 1) continue;
      const double res = f(i, j);
      r.per_index.push_back({i, j, res});
      r.residual = std::max(r.residual, res);
    }
  }
  r.pass = r.residual <= tol;
  return r;
}

RelationResult evaluate(const GeneratorCache& c, RelationId rel, double tol) {
  const auto& C = c;
  switch (rel) {
    case RelationId::B1:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.g(i) * C.g(i + 1) * C.g(i), C.g(i + 1) * C.g(i) * C.g(i + 1));
      });
    case RelationId::B2:
      return over_far(rel, C, tol, [&](int i, int j) {
        return residual(C.g(i) * C.g(j), C.g(j) * C.g(i));
      });
    case RelationId::S1:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.s(i) * C.s(i + 1) * C.s(i), C.s(i + 1) * C.s(i) * C.s(i + 1));
      });
    case RelationId::S2:
      return over_far(rel, C, tol, [&](int i, int j) {
        return residual(C.s(i) * C.s(j), C.s(j) * C.s(i));
      });
    case RelationId::S3: {
      RelationResult r{rel, 0.0, tol, true, {}};
      const auto id = DenseOperator::identity(std::size_t{1} << C.n());
      for (int i = 1; i <= C.n() - 1; ++i) {
        const double res = residual(C.s(i) * C.s(i), id);
        r.per_index.push_back({i, 0, res});
        r.residual = std::max(r.residual, res);
      }
      r.pass = r.residual <= tol;
      return r;
    }
    case RelationId::M1:
      return over_far(rel, C, tol, [&](int i, int j) {
        return residual(C.g(i) * C.s(j), C.s(j) * C.g(i));
      });
    case RelationId::M2:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.s(i) * C.s(i + 1) * C.g(i), C.g(i + 1) * C.s(i) * C.s(i + 1));
      });
    case RelationId::M3:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.g(i) * C.g(i + 1) * C.s(i), C.s(i + 1) * C.g(i) * C.g(i + 1));
      });
    case RelationId::M3P:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.g(i + 1) * C.g(i) * C.s(i + 1), C.s(i) * C.g(i + 1) * C.g(i));
      });
    case RelationId::M4:
      return over_adjacent(rel, C, tol, [&](int i) {
        return residual(C.g(i) * C.s(i + 1) * C.g(i), C.g(i + 1) * C.s(i) * C.g(i + 1));
      });
  }
  throw ArgumentError("check_relation: unknown relation");
}

void require_length(const GeneratorFamily& fam, int minimum, std::string_view what) {
  if (fam.geometry().n_sites < minimum) {
    std::ostringstream os;
    os << "relation " << what << " needs a chain of at least N = " << minimum << " sites (got N = "
       << fam.geometry().n_sites << ")";
    throw ArgumentError(os.str());
  }
}

}  // namespace

RelationResult check_relation(const GeneratorFamily& fam, RelationId rel, double tol) {
  require_length(fam, min_sites(rel), to_string(rel));
  return evaluate(GeneratorCache(fam), rel, tol);
}

RelationResult check_m2_reversed(const GeneratorFamily& fam, double tol) {
  require_length(fam, 3, "M2 reversed");
  const GeneratorCache c(fam);
  auto r = over_adjacent(RelationId::M2, c, tol, [&](int i) {
    return residual(c.s(i + 1) * c.s(i) * c.g(i + 1), c.g(i) * c.s(i + 1) * c.s(i));
  });
  return r;
}

const RelationResult& RelationReport::at(RelationId id) const {
  for (const auto& r : results) {
    if (r.id == id) return r;
  }
  throw ArgumentError("RelationReport: relation not present");
}

RelationReport classify(const GeneratorFamily& fam, double tol) {
  require_length(fam, 4, "classification");
  const GeneratorCache cache(fam);

  std::vector<std::future<RelationResult>> pending;
  pending.reserve(kAllRelations.size());
  for (RelationId id : kAllRelations) {
    pending.push_back(std::async(std::launch::async, [&cache, id, tol] { return evaluate(cache, id, tol); }));
  }

  RelationReport report{fam.geometry().n_sites, {}, check_m2_reversed(fam, tol), std::nullopt,
                        GroupClass::None, false};
  for (auto& f : pending) report.results.push_back(f.get());

  if (const auto* inv = fam.local_sigma_inverse()) {
    const auto& g = fam.local(Generator::Sigma);
    const auto id4 = DenseOperator::identity(4);
    report.sigma_inverse_residual = std::max(residual(g * *inv, id4), residual(*inv * g, id4));
  }

  auto ok = [&](RelationId id) { return report.at(id).pass; };
  if (!ok(RelationId::S1) || !ok(RelationId::S2) || !ok(RelationId::S3)) {
    report.classification = GroupClass::NotMotionGroup;
  } else if (!ok(RelationId::B1) || !ok(RelationId::B2) || !ok(RelationId::M1) || !ok(RelationId::M2)) {
    report.classification = GroupClass::None;
  } else if (ok(RelationId::M3) && ok(RelationId::M3P)) {
    report.classification = GroupClass::SymmetricLoopBraid;
  } else if (ok(RelationId::M3)) {
    report.classification = GroupClass::LoopBraid;
  } else if (ok(RelationId::M3P)) {
    report.classification = GroupClass::OppositeLoopBraid;
  } else {
    report.classification = GroupClass::VirtualBraid;
  }
  report.m4_pass = ok(RelationId::M4);
  return report;
}

}  // namespace loopbraid
