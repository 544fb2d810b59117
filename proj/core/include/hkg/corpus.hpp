#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace hkg {

using DocId = std::string;
using Warnings = std::vector<std::string>;

// Half-open byte range [start, end) into a document body.
struct SentenceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  auto operator<=>(const SentenceSpan&) const = default;
};

struct Document {
  DocId doc_id;
  std::string title;
  std::string source_url;
  std::string body;
  std::vector<SentenceSpan> sentence_spans;
  int rank = 1;
  std::string partition_id;

  std::string_view sentence(std::size_t index) const;
  bool operator==(const Document&) const = default;
};

struct Partition {
  std::string partition_id;
  std::string query;
  std::vector<DocId> documents;  // rank order

  bool operator==(const Partition&) const = default;
};

struct RetrievalConfig {
  std::size_t n = 10;
  std::string domain_filter = "wikipedia";

  void validate() const;
};

// Immutable once loaded.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<Partition> partitions, std::vector<Document> documents);

  const std::vector<Partition>& partitions() const { return partitions_; }
  const std::vector<Document>& documents() const { return documents_; }

  bool contains(std::string_view doc_id) const;
  // Throws Error{kLookup} for an unknown id.
  const Document& document(std::string_view doc_id) const;

  bool empty() const { return documents_.empty(); }
  bool operator==(const Corpus& other) const {
    return partitions_ == other.partitions_ && documents_ == other.documents_;
  }

 private:
  std::vector<Partition> partitions_;
  std::vector<Document> documents_;
  std::map<DocId, std::size_t, std::less<>> index_;
};

// Splits on '.', '!' or '?' when followed by whitespace and then an ASCII
// uppercase letter, or by end of text. Spans exclude surrounding whitespace.
// Abbreviations are not special-cased.
std::vector<SentenceSpan> split_sentences(std::string_view body);

// Reads a JSON manifest; document paths resolve relative to the manifest's
// directory. Empty partitions are kept and reported through `warnings`.
Corpus load_corpus(const std::filesystem::path& manifest_path,
                   Warnings* warnings = nullptr);

// Term-frequency index over title and body; stands in for a web search API.
class SearchIndex {
 public:
  explicit SearchIndex(std::vector<Document> documents);
  static SearchIndex from_corpus(const Corpus& corpus);

  // Relevance of a document to a set of query terms.
  std::size_t score(std::size_t doc_index,
                    const std::vector<std::string>& terms) const;

  const std::vector<Document>& documents() const { return documents_; }

 private:
  std::vector<Document> documents_;
  std::vector<std::map<std::string, std::size_t, std::less<>>> term_counts_;
};

// Query terms: lower-cased alphanumeric tokens minus stopwords, deduplicated.
std::vector<std::string> query_terms(std::string_view query);

bool matches_domain(std::string_view url, std::string_view domain_filter);

// Top `cfg.n` documents with positive score, ties broken by doc_id.
Partition retrieve(std::string_view query, const RetrievalConfig& cfg,
                   const SearchIndex& index);

}  // namespace hkg
