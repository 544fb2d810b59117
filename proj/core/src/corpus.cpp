#include "hkg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hkg/error.hpp"
#include "hkg/text.hpp"

namespace hkg {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kLoad, "cannot read file: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const json& require_field(const json& obj, const char* key,
                          const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorKind::kLoad,
                context + ": missing string field '" + key + "'");
  }
  return *it;
}

}  // namespace

std::string_view Document::sentence(std::size_t index) const {
  const SentenceSpan& s = sentence_spans.at(index);
  return std::string_view(body).substr(s.start, s.length());
}

void RetrievalConfig::validate() const {
  if (n < 1) throw Error(ErrorKind::kValidation, "retrieval n must be >= 1");
}

Corpus::Corpus(std::vector<Partition> partitions, std::vector<Document> documents)
    : partitions_(std::move(partitions)), documents_(std::move(documents)) {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    auto [it, inserted] = index_.emplace(documents_[i].doc_id, i);
    if (!inserted) {
      throw Error(ErrorKind::kValidation,
                  "duplicate doc_id: " + documents_[i].doc_id);
    }
  }
  for (const auto& p : partitions_) {
    for (const auto& id : p.documents) {
      if (!contains(id)) {
        throw Error(ErrorKind::kValidation, "partition " + p.partition_id +
                                                " references unknown document " + id);
      }
    }
  }
}

bool Corpus::contains(std::string_view doc_id) const {
  return index_.find(doc_id) != index_.end();
}

const Document& Corpus::document(std::string_view doc_id) const {
  auto it = index_.find(doc_id);
  if (it == index_.end()) {
    throw Error(ErrorKind::kLookup, "unknown document: " + std::string(doc_id));
  }
  return documents_[it->second];
}

std::vector<SentenceSpan> split_sentences(std::string_view body) {
  std::vector<SentenceSpan> spans;
  const std::size_t n = body.size();
  std::size_t i = 0;
  while (i < n) {
    while (i < n && text::is_space(body[i])) ++i;
    if (i == n) break;
    const std::size_t start = i;
    std::size_t next = n;
    std::size_t end = n;
    bool closed = false;
    for (; i < n; ++i) {
      char c = body[i];
      if (c != '.' && c != '!' && c != '?') continue;
      std::size_t j = i + 1;
      if (j == n) {
        end = next = j;
        closed = true;
        break;
      }
      if (!text::is_space(body[j])) continue;
      while (j < n && text::is_space(body[j])) ++j;
      if (j == n || text::is_upper(body[j])) {
        end = i + 1;
        next = j;
        closed = true;
        break;
      }
    }
    if (!closed) {
      // Unterminated tail runs to the last non-space character.
      end = n;
      while (end > start && text::is_space(body[end - 1])) --end;
      next = n;
    }
    spans.push_back({start, end});
    i = next;
  }
  return spans;
}

Corpus load_corpus(const std::filesystem::path& manifest_path, Warnings* warnings) {
  const std::string raw = read_file(manifest_path);
  json manifest;
  try {
    manifest = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kLoad,
                "malformed manifest " + manifest_path.string() + ": " + e.what());
  }
  const auto base = manifest_path.parent_path();

  std::vector<Partition> partitions;
  std::vector<Document> documents;
  std::set<DocId> seen;
  const json empty = json::array();
  const json& parts = manifest.contains("partitions") ? manifest["partitions"] : empty;
  if (!parts.is_array()) {
    throw Error(ErrorKind::kLoad, "manifest 'partitions' must be an array");
  }
  for (const auto& p : parts) {
    Partition part;
    part.partition_id = require_field(p, "id", "partition").get<std::string>();
    part.query = require_field(p, "query", "partition " + part.partition_id)
                     .get<std::string>();
    const json& docs = p.contains("documents") ? p["documents"] : empty;
    int rank = 0;
    for (const auto& d : docs) {
      Document doc;
      const std::string ctx = "document in partition " + part.partition_id;
      doc.doc_id = require_field(d, "id", ctx).get<std::string>();
      doc.title = require_field(d, "title", ctx).get<std::string>();
      doc.source_url = d.value("url", std::string{});
      const auto rel = require_field(d, "path", ctx).get<std::string>();
      if (!seen.insert(doc.doc_id).second) {
        throw Error(ErrorKind::kValidation, "duplicate doc_id: " + doc.doc_id);
      }
      doc.body = read_file(base / rel);
      doc.sentence_spans = split_sentences(doc.body);
      doc.rank = ++rank;
      doc.partition_id = part.partition_id;
      part.documents.push_back(doc.doc_id);
      documents.push_back(std::move(doc));
    }
    if (part.documents.empty() && warnings) {
      warnings->push_back("partition " + part.partition_id + " has no documents");
    }
    partitions.push_back(std::move(part));
  }
  return Corpus(std::move(partitions), std::move(documents));
}

SearchIndex::SearchIndex(std::vector<Document> documents)
    : documents_(std::move(documents)) {
  term_counts_.reserve(documents_.size());
  for (const auto& doc : documents_) {
    auto& counts = term_counts_.emplace_back();
    for (auto& t : text::alnum_tokens(doc.title)) ++counts[t];
    for (auto& t : text::alnum_tokens(doc.body)) ++counts[t];
  }
}

SearchIndex SearchIndex::from_corpus(const Corpus& corpus) {
  return SearchIndex(corpus.documents());
}

std::size_t SearchIndex::score(std::size_t doc_index,
                               const std::vector<std::string>& terms) const {
  const auto& counts = term_counts_.at(doc_index);
  std::size_t total = 0;
  for (const auto& t : terms) {
    auto it = counts.find(t);
    if (it != counts.end()) total += it->second;
  }
  return total;
}

std::vector<std::string> query_terms(std::string_view query) {
  std::vector<std::string> terms;
  for (auto& t : text::alnum_tokens(query)) {
    if (text::is_stopword(t)) continue;
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) {
      terms.push_back(std::move(t));
    }
  }
  return terms;
}

bool matches_domain(std::string_view url, std::string_view domain_filter) {
  if (domain_filter.empty()) return true;
  std::string_view host = url;
  if (auto p = host.find("://"); p != std::string_view::npos) {
    host = host.substr(p + 3);
  }
  host = host.substr(0, host.find('/'));
  return text::to_lower(host).find(text::to_lower(domain_filter)) !=
         std::string::npos;
}

Partition retrieve(std::string_view query, const RetrievalConfig& cfg,
                   const SearchIndex& index) {
  cfg.validate();
  const auto terms = query_terms(query);
  struct Hit {
    std::size_t score;
    const Document* doc;
  };
  std::vector<Hit> hits;
  const auto& docs = index.documents();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!matches_domain(docs[i].source_url, cfg.domain_filter)) continue;
    std::size_t s = index.score(i, terms);
    if (s > 0) hits.push_back({s, &docs[i]});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc->doc_id < b.doc->doc_id;
  });
  if (hits.size() > cfg.n) hits.resize(cfg.n);

  Partition out;
  for (const auto& t : text::alnum_tokens(query)) {
    if (!out.partition_id.empty()) out.partition_id += '-';
    out.partition_id += t;
  }
  out.query = std::string(query);
  for (const auto& h : hits) out.documents.push_back(h.doc->doc_id);
  return out;
}

}  // namespace hkg
