#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hkg/canonical_json.hpp"
#include "hkg/corpus.hpp"
#include "hkg/error.hpp"
#include "hkg/serialization.hpp"

namespace hkg {
namespace {

using testing::data_path;
using testing::TempDir;

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

Document doc(const std::string& id, const std::string& title, const std::string& body,
             const std::string& url = "https://en.wikipedia.org/wiki/X") {
  Document d;
  d.doc_id = id;
  d.title = title;
  d.body = body;
  d.source_url = url;
  d.sentence_spans = split_sentences(body);
  return d;
}

TEST(LoadCorpus, BundledFixtureHasThreeTopicsOfTenDocuments) {
  Warnings w;
  Corpus c = load_corpus(data_path("corpus/manifest.json"), &w);
  EXPECT_TRUE(w.empty());
  ASSERT_EQ(c.partitions().size(), 3u);
  EXPECT_EQ(c.documents().size(), 30u);
  for (const auto& p : c.partitions()) {
    EXPECT_EQ(p.documents.size(), 10u);
    for (std::size_t i = 0; i < p.documents.size(); ++i) {
      EXPECT_EQ(c.document(p.documents[i]).rank, static_cast<int>(i + 1));
      EXPECT_EQ(c.document(p.documents[i]).partition_id, p.partition_id);
    }
  }
  EXPECT_EQ(c.partitions()[0].query, "Former Capital Cities of Canada");
  EXPECT_EQ(c.partitions()[1].query, "Political System of Iran");
  EXPECT_EQ(c.partitions()[2].query, "Political System of Russia");
}

TEST(LoadCorpus, EmptyManifestGivesEmptyCorpus) {
  TempDir dir;
  write(dir / "m.json", R"({"partitions": []})");
  Corpus c = load_corpus(dir / "m.json");
  EXPECT_TRUE(c.empty());
  EXPECT_TRUE(c.partitions().empty());
}

TEST(LoadCorpus, TwoSentenceDocumentMatchesHandSplit) {
  TempDir dir;
  const std::string body = "Ottawa is the capital. It sits on a river.";
  write(dir / "docs/a.txt", body);
  write(dir / "m.json", R"({"partitions":[{"id":"p","query":"q","documents":[
      {"id":"a","title":"A","url":"","path":"docs/a.txt"}]}]})");
  Corpus c = load_corpus(dir / "m.json");
  const Document& d = c.document("a");
  // Hand split: "Ottawa is the capital." = [0,22), "It sits on a river." = [23,42).
  ASSERT_EQ(d.sentence_spans.size(), 2u);
  EXPECT_EQ(d.sentence_spans[0], (SentenceSpan{0, 22}));
  EXPECT_EQ(d.sentence_spans[1], (SentenceSpan{23, 42}));
  EXPECT_EQ(d.sentence(1), "It sits on a river.");
}

TEST(LoadCorpus, MissingFileNamesThePath) {
  TempDir dir;
  write(dir / "m.json", R"({"partitions":[{"id":"p","query":"q","documents":[
      {"id":"a","title":"A","url":"","path":"docs/nowhere.txt"}]}]})");
  try {
    load_corpus(dir / "m.json");
    FAIL() << "expected a load error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLoad);
    EXPECT_NE(std::string(e.what()).find("nowhere.txt"), std::string::npos);
  }
}

TEST(LoadCorpus, MissingManifestIsLoadError) {
  try {
    load_corpus("/nonexistent/manifest.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kLoad);
  }
}

TEST(LoadCorpus, DuplicateIdIsValidationError) {
  TempDir dir;
  write(dir / "a.txt", "One.");
  write(dir / "m.json", R"({"partitions":[{"id":"p","query":"q","documents":[
      {"id":"a","title":"A","path":"a.txt"},{"id":"a","title":"B","path":"a.txt"}]}]})");
  try {
    load_corpus(dir / "m.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
}

TEST(LoadCorpus, EmptyPartitionWarnsAndIsRetained) {
  TempDir dir;
  write(dir / "m.json", R"({"partitions":[{"id":"p","query":"q","documents":[]}]})");
  Warnings w;
  Corpus c = load_corpus(dir / "m.json", &w);
  ASSERT_EQ(c.partitions().size(), 1u);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("p"), std::string::npos);
}

TEST(LoadCorpus, DeterministicSerialization) {
  Corpus a = load_corpus(data_path("corpus/manifest.json"));
  Corpus b = load_corpus(data_path("corpus/manifest.json"));
  EXPECT_EQ(canonical_dump(corpus_to_json(a)), canonical_dump(corpus_to_json(b)));
}

TEST(SplitSentences, RuleExamples) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_EQ(split_sentences("No terminator here").size(), 1u);
  // Lowercase after the period does not split.
  EXPECT_EQ(split_sentences("Pop. of the city grew. Then it fell.").size(), 2u);
  // Abbreviations followed by a capital do split (documented limitation).
  EXPECT_EQ(split_sentences("Mr. Smith left. He came back!").size(), 3u);
  EXPECT_EQ(split_sentences("Really? Yes. Fine").size(), 3u);
}

// Spans plus the gaps between them rebuild the body exactly.
TEST(SplitSentences, SpansRoundTripOnRandomText) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> pieces = {"Alpha", "beta", ".", "!", "?", " ", "  ", "\n",
                                           "Gamma", "delta.", "E"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string body;
    for (int i = 0; i < 30; ++i) body += pieces[pick(rng)];
    auto spans = split_sentences(body);
    std::string rebuilt;
    std::size_t pos = 0;
    for (const auto& s : spans) {
      ASSERT_LE(pos, s.start);
      ASSERT_LT(s.start, s.end);
      ASSERT_LE(s.end, body.size());
      rebuilt += body.substr(pos, s.start - pos);
      rebuilt += body.substr(s.start, s.end - s.start);
      pos = s.end;
    }
    rebuilt += body.substr(pos);
    ASSERT_EQ(rebuilt, body);
  }
}

TEST(Retrieve, HistoryQueryReturnsTenDocuments) {
  Corpus c = load_corpus(data_path("corpus/manifest.json"));
  std::vector<Document> history;
  for (const auto& d : c.documents()) {
    if (d.partition_id == "history") history.push_back(d);
  }
  SearchIndex index(history);
  Partition p = retrieve("Former Capital Cities of Canada", RetrievalConfig{}, index);
  EXPECT_EQ(p.documents.size(), 10u);
  EXPECT_EQ(p.query, "Former Capital Cities of Canada");
}

TEST(Retrieve, NoMatchGivesEmptyPartition) {
  SearchIndex index({doc("a", "Ottawa", "Ottawa is a city.")});
  EXPECT_TRUE(retrieve("zebra giraffe", RetrievalConfig{}, index).documents.empty());
}

TEST(Retrieve, TiesBreakByDocId) {
  SearchIndex index({doc("b", "Ottawa", "Ottawa."), doc("a", "Ottawa", "Ottawa.")});
  Partition p = retrieve("Ottawa", RetrievalConfig{}, index);
  ASSERT_EQ(p.documents.size(), 2u);
  EXPECT_EQ(p.documents[0], "a");
  EXPECT_EQ(p.documents[1], "b");
}

TEST(Retrieve, DomainFilterAppliesBeforeRanking) {
  SearchIndex index({doc("a", "Ottawa", "Ottawa Ottawa Ottawa.", "https://example.com/ottawa"),
                     doc("b", "Ottawa", "Ottawa.", "https://en.wikipedia.org/wiki/Ottawa")});
  Partition p = retrieve("Ottawa", RetrievalConfig{}, index);
  ASSERT_EQ(p.documents.size(), 1u);
  EXPECT_EQ(p.documents[0], "b");
  RetrievalConfig any{10, ""};
  EXPECT_EQ(retrieve("Ottawa", any, index).documents.front(), "a");
}

TEST(Retrieve, NeverExceedsN) {
  std::vector<Document> docs;
  for (int i = 0; i < 25; ++i) docs.push_back(doc("d" + std::to_string(i), "Canada", "Canada."));
  SearchIndex index(docs);
  for (std::size_t n : {1u, 5u, 10u, 30u}) {
    EXPECT_LE(retrieve("Canada", RetrievalConfig{n, "wikipedia"}, index).documents.size(), n);
  }
}

TEST(RetrievalConfig, RejectsZero) {
  EXPECT_THROW((RetrievalConfig{0, "wikipedia"}.validate()), Error);
}

}  // namespace
}  // namespace hkg
