#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "fixtures.hpp"
#include "hkg/store.hpp"

namespace hkg {
namespace {

using nlohmann::json;
using testing::data_path;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun build(const std::filesystem::path& out_dir, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {"build", "--manifest", data_path("corpus/manifest.json").string(),
                                   "--gazetteer", data_path("corpus/gazetteer.json").string(),
                                   "--out-dir", out_dir.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

TEST(CliBuild, MatchesGoldenOutput) {
  TempDir dir;
  CliRun r = build(dir.path());
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out, slurp(data_path("golden/build.txt")));
  EXPECT_TRUE(std::filesystem::exists(dir / "gold.hkg.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "gold.tuples.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "corpus.json"));
}

TEST(CliBuild, TwiceSameHash) {
  TempDir a, b;
  CliRun first = build(a.path());
  CliRun second = build(b.path());
  ASSERT_EQ(first.code, 0);
  EXPECT_EQ(first.out.substr(0, first.out.find('\n')), second.out.substr(0, second.out.find('\n')));
  EXPECT_EQ(slurp(a / "gold.hkg.json"), slurp(b / "gold.hkg.json"));
}

TEST(CliBuild, MissingGazetteerIsUsageError) {
  TempDir dir;
  CliRun r = run({"build", "--manifest", data_path("corpus/manifest.json").string(), "--gazetteer",
               (dir / "missing.json").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("--gazetteer"), std::string::npos) << r.err;
}

TEST(CliBuild, BadParamsAreUsageErrors) {
  TempDir dir;
  EXPECT_EQ(build(dir.path(), {"--min-degree", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(build(dir.path(), {"--max-count", "many"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(CliBuild, StageTaggedRuntimeFailure) {
  TempDir dir;
  std::ofstream(dir / "manifest.json") << R"({"partitions":[{"id":"p","query":"q","documents":[
      {"id":"a","title":"A","path":"gone.txt"}]}]})";
  CliRun r = run({"build", "--manifest", (dir / "manifest.json").string(), "--gazetteer",
               data_path("corpus/gazetteer.json").string(), "--out-dir", dir.path().string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error [corpus]"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("gone.txt"), std::string::npos);
}

TEST(CliBuild, ExportsJsonLines) {
  TempDir dir;
  ASSERT_EQ(build(dir.path(), {"--tuples-jsonl", (dir / "t.jsonl").string()}).code, 0);
  std::ifstream in(dir / "t.jsonl");
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    for (const char* k : {"entity1", "entity2", "relation", "snippet", "anchor", "salience"}) {
      ASSERT_TRUE(j.contains(k)) << k;
    }
    ++n;
  }
  EXPECT_EQ(n, load_tuples_artifact(dir / "gold.tuples.json").size());
}

TEST(CliDegrade, IdentityAndDeterminism) {
  TempDir dir;
  ASSERT_EQ(build(dir.path()).code, 0);
  const std::string gold = (dir / "gold.hkg.json").string();
  CliRun full = run({"degrade", "--gold", gold, "--precision", "1", "--recall", "1", "--seed", "3",
                  "--out-dir", dir.path().string(), "--graph-id", "full"});
  ASSERT_EQ(full.code, 0) << full.err;
  json report = json::parse(full.out)["report"];
  EXPECT_EQ(report["precision"], 1.0);
  EXPECT_EQ(report["recall"], 1.0);

  CliRun a = run({"degrade", "--gold", gold, "--precision", "0.7", "--recall", "0.5", "--seed", "9",
               "--out-dir", dir.path().string(), "--graph-id", "a"});
  CliRun b = run({"degrade", "--gold", gold, "--precision", "0.7", "--recall", "0.5", "--seed", "9",
               "--out-dir", dir.path().string(), "--graph-id", "b"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["content_hash"], json::parse(b.out)["content_hash"]);
  EXPECT_TRUE(std::filesystem::exists(dir / "a.report.json"));
}

TEST(CliDegrade, HistoryOperatingPointFromConfig) {
  TempDir dir;
  save(testing::random_gold(2957, 1), dir / "gold.tuples.json");
  std::ofstream(dir / "degrade.json") << R"({"precision": 0.7, "recall": 0.31, "seed": 5})";
  CliRun r = run({"degrade", "--gold", (dir / "gold.tuples.json").string(), "--config",
               (dir / "degrade.json").string(), "--out-dir", dir.path().string(), "--graph-id", "auto",
               "--theta", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  json report = json::parse(r.out)["report"];
  EXPECT_EQ(report["system_size"], 1310);
  EXPECT_NEAR(report["precision"].get<double>(), 0.7, 1.0 / 1310);
  EXPECT_NEAR(report["recall"].get<double>(), 0.31, 1.0 / 2957);
  EXPECT_TRUE(std::filesystem::exists(dir / "auto.tuples.json"));
}

TEST(CliDegrade, FlagErrors) {
  TempDir dir;
  save(testing::random_gold(10, 1), dir / "g.json");
  const std::string g = (dir / "g.json").string();
  EXPECT_EQ(run({"degrade", "--gold", g, "--precision", "0.5"}).code, cli::kExitUsage);
  CliRun r = run({"degrade", "--gold", g, "--precision", "0.5", "--recall", "0.01", "--out-dir",
               dir.path().string()});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error [quality]"), std::string::npos) << r.err;
}

TEST(CliScore, DelegatesToQuality) {
  TempDir dir;
  TupleSet gold = testing::random_gold(6, 2);
  TupleSet sys(gold.begin(), gold.begin() + 3);
  sys.push_back(testing::tup("zz", "yy", "nothing alike"));
  save(gold, dir / "gold.json");
  save(sys, dir / "sys.json");
  CliRun r = run({"score", "--system", (dir / "sys.json").string(), "--gold", (dir / "gold.json").string(),
               "--out", (dir / "r.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "{\"gold_size\":6,\"matched\":3,\"precision\":0.75,\"recall\":0.5,\"system_size\":4}\n");
  EXPECT_EQ(load_report_artifact(dir / "r.json").matched, 3u);
}

TEST(CliMetrics, MatchesGoldenOutput) {
  TempDir dir;
  CliRun r = run({"metrics", "--log", data_path("logs/synthetic_session.jsonl").string(), "--csv",
               (dir / "m.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(data_path("golden/metrics.txt")));
  json j = json::parse(r.out);
  EXPECT_EQ(j["sessions"][0]["nc"], 3);
  EXPECT_EQ(j["aggregate"]["single_session"], true);
  EXPECT_NE(slurp(dir / "m.csv").find("synthetic-01"), std::string::npos);
}

TEST(CliServe, MissingArtifactsIsUsageError) {
  EXPECT_EQ(run({"serve", "--artifacts", "/nonexistent", "--log", "x.jsonl"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"serve", "--artifacts", "/tmp", "--log", "x.jsonl", "--port", "70000"}).code,
            cli::kExitUsage);
}

TEST(CliServe, EmptyArtifactDirIsServerFailure) {
  TempDir dir;
  CliRun r = run({"serve", "--artifacts", dir.path().string(), "--log", (dir / "e.jsonl").string(),
               "--port", "0"});
  EXPECT_EQ(r.code, cli::kExitFailure);
  EXPECT_NE(r.err.find("error [server]"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace hkg
