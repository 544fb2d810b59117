#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hkg/analytics.hpp"
#include "hkg/corpus.hpp"
#include "hkg/graph.hpp"
#include "hkg/quality.hpp"
#include "hkg/store.hpp"

namespace hkg {

struct ServerConfig {
  std::filesystem::path artifacts;
  std::filesystem::path log;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t hide_threshold = Hkg::kDefaultHideThreshold;
};

struct Response {
  int status = 200;
  nlohmann::json body;

  // Canonical text; identical bodies serialize to identical bytes.
  std::string text() const;
};

struct GraphEntry {
  Hkg hkg;
  std::optional<QualityReport> report;
  std::string content_hash;
};

// Transport-independent request handling. Read handlers are pure over the
// loaded artifacts; session state is guarded per session.
class Service {
 public:
  Service(std::map<std::string, GraphEntry> graphs, std::optional<Corpus> corpus,
          std::filesystem::path log_path, std::size_t hide_threshold = Hkg::kDefaultHideThreshold);

  // Loads every artifact in `dir`: `<id>.hkg.json` graphs, `<id>.report.json`
  // reports, and any corpus artifact. Throws kLoad when no graph is found.
  static std::unique_ptr<Service> from_directory(const std::filesystem::path& dir,
                                                 const std::filesystem::path& log_path,
                                                 std::size_t hide_threshold = Hkg::kDefaultHideThreshold);

  Response list_graphs() const;
  Response collection(const std::string& graph) const;
  Response minimap(const std::string& graph, const std::string& doc) const;
  Response detail(const std::string& graph, const std::string& doc, bool visible_only) const;
  Response focus(const std::string& graph, const std::string& doc, const std::string& concept_id) const;
  Response edge_relations(const std::string& graph, const std::string& edge) const;
  Response document_text(const std::string& doc) const;

  Response expand(const std::string& graph, const std::string& doc, const nlohmann::json& body);
  Response create_session();
  Response post_event(const nlohmann::json& body);
  Response session_metrics(const std::string& session) const;

  const std::map<std::string, GraphEntry>& graphs() const { return graphs_; }

 private:
  struct Session {
    std::mutex mu;
    std::vector<InteractionEvent> events;
    std::map<std::pair<std::string, std::string>, NodeSet> visible;  // (graph, doc)
  };

  const GraphEntry* find_graph(const std::string& id) const;
  std::shared_ptr<Session> find_session(const std::string& id) const;

  std::map<std::string, GraphEntry> graphs_;
  std::optional<Corpus> corpus_;
  std::size_t hide_threshold_;

  mutable std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_session_ = 1;

  std::mutex log_mu_;
  std::optional<EventLog> log_;  // absent when no log path is configured
};

// Binds the JSON endpoints of a Service to an HTTP listener.
class HttpFrontend {
 public:
  explicit HttpFrontend(Service& service);
  ~HttpFrontend();
  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws kState on failure.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Loads artifacts and blocks serving requests.
void serve(const ServerConfig& config);

}  // namespace hkg
