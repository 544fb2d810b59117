#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hkg/corpus.hpp"

namespace hkg {

using EntityId = std::string;

struct Anchor {
  DocId doc_id;
  SentenceSpan span;

  auto operator<=>(const Anchor&) const = default;
};

struct EntityMention {
  std::string surface;
  EntityId canonical_id;
  DocId doc_id;
  std::size_t sentence_index = 0;
  SentenceSpan span;

  bool operator==(const EntityMention&) const = default;
};

struct Tuple {
  EntityId entity1;
  EntityId entity2;
  std::string relation;
  std::string snippet;
  Anchor anchor;
  std::uint64_t salience = 0;

  bool operator==(const Tuple&) const = default;
};

using TupleSet = std::vector<Tuple>;

// Ordering used for every emitted TupleSet: (doc_id, sentence start,
// entity1, entity2, relation).
bool canonical_less(const Tuple& a, const Tuple& b);
void sort_canonical(TupleSet& tuples);

// Surface form -> canonical id. Keys are stored normalized; a surface may map
// to only one id.
class AliasTable {
 public:
  AliasTable() = default;

  // Throws Error{kValidation} when the normalized surface is already mapped
  // to a different id.
  void add(std::string_view surface, std::string_view canonical);
  const EntityId* find(std::string_view normalized) const;

  const std::map<std::string, EntityId, std::less<>>& entries() const {
    return map_;
  }
  bool empty() const { return map_.empty(); }

 private:
  std::map<std::string, EntityId, std::less<>> map_;
};

struct Gazetteer {
  std::set<EntityId> entities;
  AliasTable aliases;
};

// Reads `{ "entities": [...], "aliases": { surface: canonical } }`.
Gazetteer load_gazetteer(const std::filesystem::path& path);

// Case-fold, collapse whitespace, strip leading/trailing punctuation.
// Throws Error{kNormalization} if nothing remains.
std::string normalize_surface(std::string_view surface);
EntityId normalize_entity(std::string_view surface, const AliasTable& aliases);

// Gazetteer phrase matches plus maximal runs of capitalized words; a
// sentence-initial stopword never starts a run. Overlaps resolved
// longest-first, then leftmost. Result sorted by span start.
std::vector<EntityMention> extract_mentions(const Document& doc,
                                            const std::set<EntityId>& gazetteer,
                                            const AliasTable& aliases);

// Sentences with at least two distinct canonical ids, ascending.
std::vector<std::size_t> select_sentences(const Document& doc,
                                          const std::vector<EntityMention>& mentions);

using MentionCounts = std::map<EntityId, std::uint64_t, std::less<>>;
MentionCounts count_mentions(const std::vector<EntityMention>& mentions);

// One tuple per unordered pair of distinct entities mentioned in the
// sentence. The relation spans from the earlier first-mention to the end of
// the later first-mention; salience sums the pair's document mention counts.
TupleSet extract_tuples(const Document& doc, std::size_t sentence_index,
                        const std::vector<EntityMention>& sentence_mentions,
                        const MentionCounts& doc_counts);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual TupleSet extract(const Document& doc) const = 0;
};

class HeuristicExtractor final : public Extractor {
 public:
  explicit HeuristicExtractor(Gazetteer gazetteer);
  TupleSet extract(const Document& doc) const override;

 private:
  Gazetteer gazetteer_;
};

// Runs the extractor on every document, deduplicates on
// (entity1, entity2, relation, anchor) and sorts canonically.
TupleSet run_pipeline(const Corpus& corpus, const Extractor& extractor);
TupleSet run_pipeline(const Corpus& corpus, const Gazetteer& gazetteer);

}  // namespace hkg
