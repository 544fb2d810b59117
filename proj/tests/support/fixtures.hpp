#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hkg/extraction.hpp"

namespace hkg::testing {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(HKG_DATA_DIR) / rel;
}

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 gen{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / ("hkg-test-" + std::to_string(gen()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Tuple tup(const std::string& e1, const std::string& e2, const std::string& relation,
                        const std::string& doc = "d1", std::size_t sentence = 0) {
  Tuple t;
  t.entity1 = e1;
  t.entity2 = e2;
  t.relation = relation;
  t.snippet = relation + ".";
  t.anchor = Anchor{doc, SentenceSpan{sentence * 100, sentence * 100 + t.snippet.size()}};
  t.salience = 2;
  return t;
}

inline std::string entity_name(std::size_t i) { return "e" + std::to_string(i); }

// Random but valid tuples over `entities` ids spread across `docs` documents.
inline TupleSet random_tuples(std::mt19937_64& rng, std::size_t count, std::size_t entities,
                              std::size_t docs) {
  static const std::vector<std::string> kWords = {
      "founded", "governs", "borders", "elected", "appoints", "captured", "moved",
      "named",   "merged",  "divided", "serves",  "chairs",   "replaced", "hosted"};
  std::uniform_int_distribution<std::size_t> ent(0, entities - 1);
  std::uniform_int_distribution<std::size_t> doc(0, docs - 1);
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::uniform_int_distribution<std::size_t> sentence(0, 9);
  TupleSet out;
  while (out.size() < count) {
    std::size_t a = ent(rng), b = ent(rng);
    if (a == b) continue;
    std::string rel = entity_name(a) + " " + kWords[word(rng)] + " " + entity_name(b);
    out.push_back(testing::tup(entity_name(a), entity_name(b), rel, "doc" + std::to_string(doc(rng)),
                             sentence(rng)));
  }
  return out;
}

// Gold set of `size` tuples with distinct unordered entity pairs and
// pairwise-dissimilar relations, over enough entities to leave free pairs.
inline TupleSet random_gold(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::size_t entities = 8;
  while (entities * (entities - 1) / 2 < size * 4) ++entities;
  std::uniform_int_distribution<std::size_t> ent(0, entities - 1);
  std::set<std::pair<std::size_t, std::size_t>> used;
  TupleSet out;
  while (out.size() < size) {
    std::size_t a = ent(rng), b = ent(rng);
    if (a == b) continue;
    if (!used.insert({std::min(a, b), std::max(a, b)}).second) continue;
    const std::size_t k = out.size();
    std::string rel = "w" + std::to_string(k) + " x" + std::to_string(k) + " y" + std::to_string(k);
    out.push_back(testing::tup(entity_name(a), entity_name(b), rel, "doc" + std::to_string(k % 7), k));
  }
  return out;
}

}  // namespace hkg::testing
