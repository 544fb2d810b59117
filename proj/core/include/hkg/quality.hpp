#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "hkg/extraction.hpp"

namespace hkg {

// Entities must agree exactly as an unordered canonical-id pair; relations
// must reach token-set Jaccard >= theta.
struct MatchCriterion {
  double theta = 0.5;

  void validate() const;
};

struct MatchResult {
  std::size_t matched = 0;
  // (system index, gold index) into the caller's inputs.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct QualityReport {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t matched = 0;
  std::size_t system_size = 0;
  std::size_t gold_size = 0;

  static QualityReport from_counts(std::size_t matched, std::size_t system_size,
                                   std::size_t gold_size);
  bool operator==(const QualityReport&) const = default;
};

struct DegradationSpec {
  double target_precision = 1.0;
  double target_recall = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Jaccard similarity of lower-cased alphanumeric token sets; two empty
// relations are identical.
double relation_similarity(std::string_view a, std::string_view b);

// Greedy one-to-one matching in canonical order: each system tuple takes the
// first unconsumed gold tuple that satisfies the criterion.
MatchResult match_tuples(const TupleSet& system, const TupleSet& gold,
                         const MatchCriterion& criterion = {});

QualityReport score(const TupleSet& system, const TupleSet& gold,
                    const MatchCriterion& criterion = {});

// floor(x + 1/2), with a 1e-9 allowance so that products landing a hair
// below a .5 boundary through binary rounding still round up.
std::size_t round_half_up(double x);

struct DegradationPlan {
  std::size_t kept = 0;      // true positives
  std::size_t spurious = 0;  // injected false positives
};

// Counts implied by a spec for a gold set of the given size. Throws kSpec
// when no true positive would survive while precision < 1.
DegradationPlan plan_degradation(std::size_t gold_size, const DegradationSpec& spec);

// Keeps a seeded uniform sample of gold tuples and injects spurious tuples
// whose entity pair never occurs in gold and whose relation is a seeded
// token shuffle of a gold relation. Output in canonical order.
TupleSet degrade(const TupleSet& gold, const DegradationSpec& spec);

}  // namespace hkg
