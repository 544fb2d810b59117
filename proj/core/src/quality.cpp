#include "hkg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "hkg/error.hpp"
#include "hkg/random.hpp"
#include "hkg/text.hpp"

namespace hkg {
namespace {

using PairKey = std::pair<EntityId, EntityId>;

PairKey unordered_pair(const Tuple& t) {
  return t.entity1 < t.entity2 ? PairKey{t.entity1, t.entity2}
                               : PairKey{t.entity2, t.entity1};
}

std::vector<std::size_t> canonical_indices(const TupleSet& tuples) {
  std::vector<std::size_t> idx(tuples.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(tuples[a], tuples[b]);
  });
  return idx;
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ' ';
    out += p;
  }
  return out;
}

}  // namespace

void MatchCriterion::validate() const {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorKind::kValidation, "match threshold must be in (0, 1]");
  }
}

QualityReport QualityReport::from_counts(std::size_t matched, std::size_t system_size,
                                         std::size_t gold_size) {
  QualityReport r;
  r.matched = matched;
  r.system_size = system_size;
  r.gold_size = gold_size;
  r.precision = system_size ? static_cast<double>(matched) / static_cast<double>(system_size) : 0.0;
  r.recall = gold_size ? static_cast<double>(matched) / static_cast<double>(gold_size) : 0.0;
  return r;
}

void DegradationSpec::validate() const {
  if (!(target_precision > 0.0 && target_precision <= 1.0)) {
    throw Error(ErrorKind::kSpec, "target precision must be in (0, 1]");
  }
  if (!(target_recall >= 0.0 && target_recall <= 1.0)) {
    throw Error(ErrorKind::kSpec, "target recall must be in [0, 1]");
  }
}

double relation_similarity(std::string_view a, std::string_view b) {
  auto ta = text::alnum_tokens(a);
  auto tb = text::alnum_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  const std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

MatchResult match_tuples(const TupleSet& system, const TupleSet& gold,
                         const MatchCriterion& criterion) {
  criterion.validate();
  std::map<PairKey, std::vector<std::size_t>> by_pair;
  for (std::size_t g : canonical_indices(gold)) by_pair[unordered_pair(gold[g])].push_back(g);

  std::vector<bool> consumed(gold.size(), false);
  MatchResult result;
  for (std::size_t s : canonical_indices(system)) {
    auto it = by_pair.find(unordered_pair(system[s]));
    if (it == by_pair.end()) continue;
    for (std::size_t g : it->second) {
      if (consumed[g]) continue;
      if (relation_similarity(system[s].relation, gold[g].relation) >= criterion.theta) {
        consumed[g] = true;
        result.pairs.emplace_back(s, g);
        ++result.matched;
        break;
      }
    }
  }
  return result;
}

QualityReport score(const TupleSet& system, const TupleSet& gold,
                    const MatchCriterion& criterion) {
  return QualityReport::from_counts(match_tuples(system, gold, criterion).matched,
                                    system.size(), gold.size());
}

std::size_t round_half_up(double x) {
  if (x <= 0.0) return 0;
  return static_cast<std::size_t>(std::floor(x + 0.5 + 1e-9));
}

DegradationPlan plan_degradation(std::size_t gold_size, const DegradationSpec& spec) {
  spec.validate();
  if (gold_size == 0) throw Error(ErrorKind::kSpec, "cannot degrade an empty gold set");
  const double p = spec.target_precision;
  DegradationPlan plan;
  plan.kept = round_half_up(spec.target_recall * static_cast<double>(gold_size));
  if (plan.kept == 0 && p < 1.0) {
    throw Error(ErrorKind::kSpec,
                "recall rounds to zero true positives; precision below 1 is unattainable");
  }
  plan.spurious = round_half_up(static_cast<double>(plan.kept) * (1.0 - p) / p);
  return plan;
}

TupleSet degrade(const TupleSet& gold_in, const DegradationSpec& spec) {
  const DegradationPlan plan = plan_degradation(gold_in.size(), spec);
  TupleSet gold = gold_in;
  sort_canonical(gold);
  SeededRng rng(spec.seed);

  std::vector<std::size_t> order(gold.size());
  std::iota(order.begin(), order.end(), 0);
  rng.partial_shuffle(order, plan.kept);
  TupleSet out;
  out.reserve(plan.kept + plan.spurious);
  for (std::size_t i = 0; i < plan.kept; ++i) out.push_back(gold[order[i]]);

  if (plan.spurious > 0) {
    std::set<EntityId> entity_set;
    std::set<PairKey> gold_pairs;
    for (const auto& t : gold) {
      entity_set.insert(t.entity1);
      entity_set.insert(t.entity2);
      gold_pairs.insert(unordered_pair(t));
    }
    const std::vector<EntityId> entities(entity_set.begin(), entity_set.end());
    const std::size_t e = entities.size();
    const std::size_t available = e * (e - 1) / 2 - gold_pairs.size();
    if (available < plan.spurious) {
      throw Error(ErrorKind::kSpec, "gold has only " + std::to_string(available) +
                                        " unused entity pairs; " +
                                        std::to_string(plan.spurious) + " spurious tuples needed");
    }

    std::vector<PairKey> pairs;
    if (available <= 4 * plan.spurious) {
      for (std::size_t i = 0; i < e; ++i) {
        for (std::size_t j = i + 1; j < e; ++j) {
          PairKey k{entities[i], entities[j]};
          if (!gold_pairs.count(k)) pairs.push_back(std::move(k));
        }
      }
      rng.partial_shuffle(pairs, plan.spurious);
      pairs.resize(plan.spurious);
    } else {
      std::set<PairKey> used;
      while (pairs.size() < plan.spurious) {
        std::size_t i = rng.below(e);
        std::size_t j = rng.below(e);
        if (i == j) continue;
        PairKey k = entities[i] < entities[j] ? PairKey{entities[i], entities[j]}
                                              : PairKey{entities[j], entities[i]};
        if (gold_pairs.count(k) || !used.insert(k).second) continue;
        pairs.push_back(std::move(k));
      }
    }

    for (auto& [a, b] : pairs) {
      const Tuple& source = gold[rng.below(gold.size())];
      auto tokens = text::split_whitespace(source.relation);
      rng.shuffle(tokens);
      out.push_back({a, b, join(tokens), source.snippet, source.anchor, source.salience});
    }
  }
  sort_canonical(out);
  return out;
}

}  // namespace hkg
