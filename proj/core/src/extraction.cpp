#include "hkg/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <json.hpp>

#include "hkg/error.hpp"
#include "hkg/text.hpp"

namespace hkg {
namespace {

struct Candidate {
  std::size_t start;
  std::size_t end;
};

bool only_space_between(std::string_view body, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (!text::is_space(body[i])) return false;
  }
  return true;
}

// Lower-cased words joined by single spaces; the key space shared by
// gazetteer phrases and document text.
std::string phrase_key(const std::vector<text::Token>& words, std::size_t first,
                       std::size_t last) {
  std::string key;
  for (std::size_t i = first; i <= last; ++i) {
    if (i > first) key += ' ';
    key += text::to_lower(words[i].text);
  }
  return key;
}

struct PhraseSet {
  std::set<std::string, std::less<>> keys;
  std::size_t max_words = 0;

  void add(std::string_view phrase) {
    auto w = text::words(phrase);
    if (w.empty()) return;
    max_words = std::max(max_words, w.size());
    keys.insert(phrase_key(w, 0, w.size() - 1));
  }
};

}  // namespace

bool canonical_less(const Tuple& a, const Tuple& b) {
  return std::tie(a.anchor.doc_id, a.anchor.span, a.entity1, a.entity2, a.relation) <
         std::tie(b.anchor.doc_id, b.anchor.span, b.entity1, b.entity2, b.relation);
}

void sort_canonical(TupleSet& tuples) {
  std::stable_sort(tuples.begin(), tuples.end(), canonical_less);
}

void AliasTable::add(std::string_view surface, std::string_view canonical) {
  std::string key = normalize_surface(surface);
  std::string value = normalize_surface(canonical);
  auto [it, inserted] = map_.emplace(key, value);
  if (!inserted && it->second != value) {
    throw Error(ErrorKind::kValidation, "alias '" + key + "' maps to both '" +
                                            it->second + "' and '" + value + "'");
  }
}

const EntityId* AliasTable::find(std::string_view normalized) const {
  auto it = map_.find(normalized);
  return it == map_.end() ? nullptr : &it->second;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kLoad, "cannot read gazetteer: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kLoad, "malformed gazetteer " + path.string() + ": " + e.what());
  }
  Gazetteer g;
  if (j.contains("entities")) {
    for (const auto& e : j.at("entities")) g.entities.insert(normalize_surface(e.get<std::string>()));
  }
  if (j.contains("aliases")) {
    for (const auto& [surface, canonical] : j.at("aliases").items()) {
      g.aliases.add(surface, canonical.get<std::string>());
    }
  }
  return g;
}

std::string normalize_surface(std::string_view surface) {
  std::string out;
  bool pending_space = false;
  for (char c : surface) {
    if (text::is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += text::is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  std::size_t b = 0;
  std::size_t e = out.size();
  while (b < e && (text::is_punct(out[b]) || text::is_space(out[b]))) ++b;
  while (e > b && (text::is_punct(out[e - 1]) || text::is_space(out[e - 1]))) --e;
  if (b == e) {
    throw Error(ErrorKind::kNormalization,
                "surface has no entity text: '" + std::string(surface) + "'");
  }
  return out.substr(b, e - b);
}

EntityId normalize_entity(std::string_view surface, const AliasTable& aliases) {
  std::string norm = normalize_surface(surface);
  if (const EntityId* mapped = aliases.find(norm)) return *mapped;
  return norm;
}

std::vector<EntityMention> extract_mentions(const Document& doc,
                                            const std::set<EntityId>& gazetteer,
                                            const AliasTable& aliases) {
  PhraseSet phrases;
  for (const auto& e : gazetteer) phrases.add(e);
  for (const auto& [surface, _] : aliases.entries()) phrases.add(surface);

  const std::string_view body = doc.body;
  std::vector<EntityMention> mentions;
  for (std::size_t s = 0; s < doc.sentence_spans.size(); ++s) {
    const SentenceSpan span = doc.sentence_spans[s];
    const auto words = text::words(body.substr(span.start, span.length()), span.start);
    auto adjacent = [&](std::size_t i) {
      return only_space_between(body, words[i - 1].end, words[i].start);
    };

    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < words.size(); ++i) {
      std::size_t limit = std::min(phrases.max_words, words.size() - i);
      for (std::size_t len = limit; len >= 1; --len) {
        std::size_t last = i + len - 1;
        bool contiguous = true;
        for (std::size_t k = i + 1; k <= last && contiguous; ++k) contiguous = adjacent(k);
        if (contiguous && phrases.keys.count(phrase_key(words, i, last))) {
          candidates.push_back({words[i].start, words[last].end});
          break;
        }
      }
    }

    auto capitalized = [&](std::size_t i) {
      if (!text::is_upper(words[i].text.front())) return false;
      return i != 0 || !text::is_stopword(text::to_lower(words[i].text));
    };
    for (std::size_t i = 0; i < words.size();) {
      if (!capitalized(i)) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < words.size() && capitalized(j + 1) && adjacent(j + 1)) ++j;
      candidates.push_back({words[i].start, words[j].end});
      i = j + 1;
    }

    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
      if (a.end - a.start != b.end - b.start) return a.end - a.start > b.end - b.start;
      return a.start < b.start;
    });
    std::vector<Candidate> accepted;
    for (const auto& c : candidates) {
      bool overlaps = std::any_of(accepted.begin(), accepted.end(), [&](const Candidate& a) {
        return c.start < a.end && a.start < c.end;
      });
      if (!overlaps) accepted.push_back(c);
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const Candidate& a, const Candidate& b) { return a.start < b.start; });
    for (const auto& c : accepted) {
      EntityMention m;
      m.surface = std::string(body.substr(c.start, c.end - c.start));
      m.canonical_id = normalize_entity(m.surface, aliases);
      m.doc_id = doc.doc_id;
      m.sentence_index = s;
      m.span = {c.start, c.end};
      mentions.push_back(std::move(m));
    }
  }
  return mentions;
}

std::vector<std::size_t> select_sentences(const Document& doc,
                                          const std::vector<EntityMention>& mentions) {
  std::map<std::size_t, std::set<EntityId>> distinct;
  for (const auto& m : mentions) {
    if (m.doc_id != doc.doc_id) continue;
    distinct[m.sentence_index].insert(m.canonical_id);
  }
  std::vector<std::size_t> out;
  for (const auto& [index, ids] : distinct) {
    if (ids.size() >= 2) out.push_back(index);
  }
  return out;
}

MentionCounts count_mentions(const std::vector<EntityMention>& mentions) {
  MentionCounts counts;
  for (const auto& m : mentions) ++counts[m.canonical_id];
  return counts;
}

TupleSet extract_tuples(const Document& doc, std::size_t sentence_index,
                        const std::vector<EntityMention>& sentence_mentions,
                        const MentionCounts& doc_counts) {
  std::vector<const EntityMention*> firsts;
  std::vector<const EntityMention*> ordered;
  for (const auto& m : sentence_mentions) {
    if (m.sentence_index == sentence_index) ordered.push_back(&m);
  }
  std::sort(ordered.begin(), ordered.end(),
            [](const EntityMention* a, const EntityMention* b) { return a->span.start < b->span.start; });
  for (const EntityMention* m : ordered) {
    bool seen = std::any_of(firsts.begin(), firsts.end(), [&](const EntityMention* f) {
      return f->canonical_id == m->canonical_id;
    });
    if (!seen) firsts.push_back(m);
  }

  auto count_of = [&](const EntityId& id) -> std::uint64_t {
    auto it = doc_counts.find(id);
    return it == doc_counts.end() ? 0 : it->second;
  };

  const SentenceSpan span = doc.sentence_spans.at(sentence_index);
  const std::string_view body = doc.body;
  TupleSet out;
  for (std::size_t i = 0; i < firsts.size(); ++i) {
    for (std::size_t j = i + 1; j < firsts.size(); ++j) {
      const EntityMention& a = *firsts[i];
      const EntityMention& b = *firsts[j];
      Tuple t;
      t.entity1 = a.canonical_id;
      t.entity2 = b.canonical_id;
      t.relation = std::string(text::trim(body.substr(a.span.start, b.span.end - a.span.start)));
      t.snippet = std::string(body.substr(span.start, span.length()));
      t.anchor = {doc.doc_id, span};
      t.salience = count_of(a.canonical_id) + count_of(b.canonical_id);
      out.push_back(std::move(t));
    }
  }
  return out;
}

HeuristicExtractor::HeuristicExtractor(Gazetteer gazetteer)
    : gazetteer_(std::move(gazetteer)) {}

TupleSet HeuristicExtractor::extract(const Document& doc) const {
  auto mentions = extract_mentions(doc, gazetteer_.entities, gazetteer_.aliases);
  const MentionCounts counts = count_mentions(mentions);
  TupleSet out;
  for (std::size_t s : select_sentences(doc, mentions)) {
    std::vector<EntityMention> in_sentence;
    for (const auto& m : mentions) {
      if (m.sentence_index == s) in_sentence.push_back(m);
    }
    auto tuples = extract_tuples(doc, s, in_sentence, counts);
    out.insert(out.end(), std::make_move_iterator(tuples.begin()),
               std::make_move_iterator(tuples.end()));
  }
  return out;
}

TupleSet run_pipeline(const Corpus& corpus, const Extractor& extractor) {
  TupleSet all;
  for (const auto& doc : corpus.documents()) {
    TupleSet tuples;
    try {
      tuples = extractor.extract(doc);
    } catch (const Error& e) {
      throw Error(e.kind(), "document " + doc.doc_id + ": " + e.what());
    }
    all.insert(all.end(), std::make_move_iterator(tuples.begin()),
               std::make_move_iterator(tuples.end()));
  }
  sort_canonical(all);
  auto same_key = [](const Tuple& a, const Tuple& b) {
    return a.entity1 == b.entity1 && a.entity2 == b.entity2 &&
           a.relation == b.relation && a.anchor == b.anchor;
  };
  all.erase(std::unique(all.begin(), all.end(), same_key), all.end());
  return all;
}

TupleSet run_pipeline(const Corpus& corpus, const Gazetteer& gazetteer) {
  return run_pipeline(corpus, HeuristicExtractor(gazetteer));
}

}  // namespace hkg
