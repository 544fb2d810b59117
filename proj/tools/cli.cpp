#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hkg/analytics.hpp"
#include "hkg/canonical_json.hpp"
#include "hkg/corpus.hpp"
#include "hkg/error.hpp"
#include "hkg/extraction.hpp"
#include "hkg/graph.hpp"
#include "hkg/quality.hpp"
#include "hkg/serialization.hpp"
#include "hkg/server.hpp"
#include "hkg/store.hpp"

namespace hkg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Tags failures with the pipeline stage that raised them.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(name, e.what());
  } catch (const json::exception& e) {
    throw StageError(name, e.what());
  } catch (const fs::filesystem_error& e) {
    throw StageError(name, e.what());
  }
}

void print_warnings(const Warnings& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

// Tuples either straight from a tuples artifact or recovered from an HKG.
struct TupleSource {
  TupleSet tuples;
  std::optional<Hkg> hkg;
};

TupleSource load_tuple_source(const fs::path& path) {
  Artifact a = load(path);
  if (auto* h = std::get_if<Hkg>(&a)) return {graph_tuples(h->detail), std::move(*h)};
  if (auto* t = std::get_if<TupleSet>(&a)) return {std::move(*t), std::nullopt};
  throw Error(ErrorKind::kValidation, path.string() + " holds neither tuples nor an hkg");
}

struct BuildOptions {
  std::string manifest;
  std::string gazetteer;
  std::string out_dir = "artifacts";
  std::string graph_id = "gold";
  std::string tuples_jsonl;
  std::size_t min_degree = 3;
  std::size_t max_count = 15;
  bool relax_ties = false;
};

int cmd_build(const BuildOptions& o, std::ostream& out, std::ostream& err) {
  Warnings warnings;
  const Corpus corpus = stage("corpus", [&] { return load_corpus(o.manifest, &warnings); });
  print_warnings(warnings, err);
  const Gazetteer gazetteer = stage("extraction", [&] { return load_gazetteer(o.gazetteer); });
  const TupleSet tuples = stage("extraction", [&] { return run_pipeline(corpus, gazetteer); });
  CentralConceptParams params{o.min_degree, o.max_count, o.relax_ties};
  const Hkg hkg = stage("hkg", [&] { return build_hkg(corpus, tuples, params); });

  std::string hash;
  stage("store", [&] {
    fs::create_directories(o.out_dir);
    save(corpus, fs::path(o.out_dir) / "corpus.json");
    save(tuples, fs::path(o.out_dir) / (o.graph_id + ".tuples.json"));
    hash = save(hkg, fs::path(o.out_dir) / (o.graph_id + ".hkg.json"));
    if (!o.tuples_jsonl.empty()) {
      std::ofstream f(o.tuples_jsonl, std::ios::binary);
      if (!f) throw Error(ErrorKind::kStorage, "cannot write " + o.tuples_jsonl);
      f << tuples_to_jsonl(tuples);
    }
  });

  out << "content_hash " << hash << "\n";
  out << "documents " << corpus.documents().size() << "\n";
  out << "partitions " << corpus.partitions().size() << "\n";
  out << "tuples " << tuples.size() << "\n";
  out << "nodes " << hkg.detail.nodes.size() << "\n";
  out << "edges " << hkg.detail.edges.size() << "\n";
  for (const auto& [doc, concepts] : hkg.minimaps) {
    out << "central_concepts " << doc << " " << concepts.size() << "\n";
  }
  return kExitOk;
}

struct DegradeOptions {
  std::string gold;
  std::string config;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "artifacts";
  std::string graph_id;
  double theta = 0.5;
};

int cmd_degrade(const DegradeOptions& o, std::ostream& out, std::ostream&) {
  DegradationSpec spec;
  if (!o.config.empty()) {
    stage("config", [&] {
      std::ifstream in(o.config);
      if (!in) throw Error(ErrorKind::kLoad, "cannot read degradation config " + o.config);
      json j = json::parse(in);
      spec.target_precision = j.at("precision").get<double>();
      spec.target_recall = j.at("recall").get<double>();
      spec.seed = j.at("seed").get<std::uint64_t>();
    });
  }
  if (o.precision) spec.target_precision = *o.precision;
  if (o.recall) spec.target_recall = *o.recall;
  if (o.seed) spec.seed = *o.seed;

  const TupleSource gold = stage("store", [&] { return load_tuple_source(o.gold); });
  const TupleSet degraded = stage("quality", [&] { return degrade(gold.tuples, spec); });
  const QualityReport report =
      stage("quality", [&] { return score(degraded, gold.tuples, MatchCriterion{o.theta}); });

  std::string id = o.graph_id;
  if (id.empty()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "auto-p%g-r%g-s%llu", spec.target_precision, spec.target_recall,
                  static_cast<unsigned long long>(spec.seed));
    id = buf;
  }
  std::string hash;
  stage("store", [&] {
    fs::create_directories(o.out_dir);
    if (gold.hkg) {
      Hkg variant = build_hkg(gold.hkg->collection, degraded, gold.hkg->params);
      hash = save(variant, fs::path(o.out_dir) / (id + ".hkg.json"));
    } else {
      hash = save(degraded, fs::path(o.out_dir) / (id + ".tuples.json"));
    }
    save(report, fs::path(o.out_dir) / (id + ".report.json"));
  });
  out << canonical_dump(json{{"content_hash", hash}, {"graph_id", id}, {"report", report}}) << "\n";
  return kExitOk;
}

int cmd_score(const std::string& system, const std::string& gold, double theta,
              const std::string& out_path, std::ostream& out) {
  const TupleSource sys = stage("store", [&] { return load_tuple_source(system); });
  const TupleSource ref = stage("store", [&] { return load_tuple_source(gold); });
  const QualityReport report =
      stage("quality", [&] { return score(sys.tuples, ref.tuples, MatchCriterion{theta}); });
  if (!out_path.empty()) stage("store", [&] { save(report, out_path); });
  out << canonical_dump(json(report)) << "\n";
  return kExitOk;
}

int cmd_metrics(const std::string& log, const std::string& csv, std::ostream& out,
                std::ostream& err) {
  Warnings warnings;
  const auto events = stage("store", [&] { return read_events(log, &warnings); });
  std::vector<SessionMetrics> per_session;
  stage("analytics", [&] {
    for (const auto& [id, list] : group_by_session(events)) {
      per_session.push_back(session_metrics(list, &warnings));
    }
  });
  print_warnings(warnings, err);
  json sessions = json::array();
  for (const auto& m : per_session) sessions.push_back(m);
  json report{{"sessions", sessions},
              {"aggregate", per_session.empty() ? json(nullptr)
                                                : json(stage("analytics", [&] {
                                                    return aggregate(per_session);
                                                  }))}};
  if (!csv.empty()) {
    stage("store", [&] {
      std::ofstream f(csv, std::ios::binary);
      if (!f) throw Error(ErrorKind::kStorage, "cannot write " + csv);
      f << metrics_csv(per_session);
    });
  }
  out << canonical_dump(report) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hierarchical knowledge graph pipeline", "hkg"};
  app.require_subcommand(1);

  BuildOptions build;
  auto* b = app.add_subcommand("build", "Extract tuples from a corpus and build the layered graph");
  b->add_option("--manifest", build.manifest, "Corpus manifest (JSON)")->required()->check(CLI::ExistingFile);
  b->add_option("--gazetteer", build.gazetteer, "Gazetteer and alias table (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  b->add_option("--out-dir", build.out_dir, "Artifact directory")->capture_default_str();
  b->add_option("--graph-id", build.graph_id, "Id of the saved graph")->capture_default_str();
  b->add_option("--tuples-jsonl", build.tuples_jsonl, "Also export tuples as JSON Lines");
  b->add_option("--min-degree", build.min_degree, "Starting degree threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  b->add_option("--max-count", build.max_count, "Maximum central concepts per document")
      ->capture_default_str();
  b->add_flag("--relax-ties", build.relax_ties, "Keep the top max-count nodes on degree ties");

  DegradeOptions deg;
  auto* d = app.add_subcommand("degrade", "Synthesize a lower-quality variant of a gold graph");
  d->add_option("--gold", deg.gold, "Gold hkg or tuples artifact")->required()->check(CLI::ExistingFile);
  d->add_option("--config", deg.config, "Degradation config {precision, recall, seed}")
      ->check(CLI::ExistingFile);
  d->add_option("--precision", deg.precision, "Target precision in (0, 1]");
  d->add_option("--recall", deg.recall, "Target recall in [0, 1]");
  d->add_option("--seed", deg.seed, "Sampling seed");
  d->add_option("--out-dir", deg.out_dir, "Artifact directory")->capture_default_str();
  d->add_option("--graph-id", deg.graph_id, "Id of the degraded graph");
  d->add_option("--theta", deg.theta, "Relation Jaccard threshold for the report")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();

  std::string sys_path, gold_path, score_out;
  double theta = 0.5;
  auto* s = app.add_subcommand("score", "Precision and recall of a system set against gold");
  s->add_option("--system", sys_path, "System hkg or tuples artifact")->required()->check(CLI::ExistingFile);
  s->add_option("--gold", gold_path, "Gold hkg or tuples artifact")->required()->check(CLI::ExistingFile);
  s->add_option("--theta", theta, "Relation Jaccard threshold")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  s->add_option("--out", score_out, "Also save the report artifact");

  std::string log_path, csv_path;
  auto* m = app.add_subcommand("metrics", "Session measures from an interaction log");
  m->add_option("--log", log_path, "Event log (JSON Lines)")->required()->check(CLI::ExistingFile);
  m->add_option("--csv", csv_path, "Also write one CSV row per session");

  ServerConfig server;
  std::string artifacts, serve_log;
  auto* v = app.add_subcommand("serve", "Serve graphs and collect interaction events over HTTP");
  v->add_option("--artifacts", artifacts, "Artifact directory")->required()->check(CLI::ExistingDirectory);
  v->add_option("--port", server.port, "Listen port")->check(CLI::Range(0, 65535))->capture_default_str();
  v->add_option("--log", serve_log, "Event log path (JSON Lines)")->required();
  v->add_option("--host", server.host, "Listen address")->capture_default_str();
  v->add_option("--hide-threshold", server.hide_threshold, "Minimum in-document frequency shown initially")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (d->parsed() && deg.config.empty() && (!deg.precision || !deg.recall)) {
    err << "degrade: give --config or both --precision and --recall\n";
    return kExitUsage;
  }

  try {
    if (b->parsed()) return cmd_build(build, out, err);
    if (d->parsed()) return cmd_degrade(deg, out, err);
    if (s->parsed()) return cmd_score(sys_path, gold_path, theta, score_out, out);
    if (m->parsed()) return cmd_metrics(log_path, csv_path, out, err);
    if (v->parsed()) {
      server.artifacts = artifacts;
      server.log = serve_log;
      stage("server", [&] { serve(server); });
      return kExitOk;
    }
  } catch (const StageError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hkg::cli
