#include "hkg/server.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <httplib.h>

#include "hkg/canonical_json.hpp"
#include "hkg/error.hpp"
#include "hkg/serialization.hpp"

namespace hkg {
namespace {

using nlohmann::json;

Response not_found(const char* code) { return {404, json{{"error", code}}}; }

Response bad_request(const std::string& message) {
  return {400, json{{"error", "bad_request"}, {"message", message}}};
}

Response conflict(const char* code, const std::string& message) {
  return {409, json{{"error", code}, {"message", message}}};
}

std::string session_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(n));
  return buf;
}

std::optional<std::uint64_t> session_number(const std::string& id) {
  if (id.size() < 2 || id[0] != 's') return std::nullopt;
  std::uint64_t n = 0;
  auto [p, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
  if (ec != std::errc() || p != id.data() + id.size()) return std::nullopt;
  return n;
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string Response::text() const { return canonical_dump(body); }

Service::Service(std::map<std::string, GraphEntry> graphs, std::optional<Corpus> corpus,
                 std::filesystem::path log_path, std::size_t hide_threshold)
    : graphs_(std::move(graphs)), corpus_(std::move(corpus)), hide_threshold_(hide_threshold) {
  if (graphs_.empty()) throw Error(ErrorKind::kLoad, "no graph artifacts to serve");
  if (log_path.empty()) return;
  Warnings warnings;
  log_.emplace(log_path, &warnings);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (!std::filesystem::exists(log_path)) return;
  for (auto& [id, events] : group_by_session(read_events(log_path))) {
    auto session = std::make_shared<Session>();
    session->events = std::move(events);
    sessions_.emplace(id, std::move(session));
    if (auto n = session_number(id)) next_session_ = std::max(next_session_, *n + 1);
  }
}

std::unique_ptr<Service> Service::from_directory(const std::filesystem::path& dir,
                                                 const std::filesystem::path& log_path,
                                                 std::size_t hide_threshold) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::kLoad, "artifact directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::map<std::string, GraphEntry> graphs;
  std::map<std::string, QualityReport> reports;
  std::optional<Corpus> corpus;
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    if (ends_with(name, ".hkg.json")) {
      ArtifactEnvelope env = load_envelope(path);
      std::string id = name.substr(0, name.size() - std::string_view(".hkg.json").size());
      graphs[id] = GraphEntry{std::get<Hkg>(from_envelope(env)), std::nullopt, env.content_hash};
    } else if (ends_with(name, ".report.json")) {
      std::string id = name.substr(0, name.size() - std::string_view(".report.json").size());
      reports[id] = load_report_artifact(path);
    } else if (name == "corpus.json") {
      corpus = load_corpus_artifact(path);
    }
  }
  for (auto& [id, report] : reports) {
    if (auto it = graphs.find(id); it != graphs.end()) it->second.report = report;
  }
  return std::make_unique<Service>(std::move(graphs), std::move(corpus), log_path, hide_threshold);
}

const GraphEntry* Service::find_graph(const std::string& id) const {
  auto it = graphs_.find(id);
  return it == graphs_.end() ? nullptr : &it->second;
}

std::shared_ptr<Service::Session> Service::find_session(const std::string& id) const {
  std::lock_guard lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::list_graphs() const {
  json list = json::array();
  for (const auto& [id, g] : graphs_) {
    list.push_back({{"id", id},
                    {"content_hash", g.content_hash},
                    {"documents", g.hkg.minimaps.size()},
                    {"nodes", g.hkg.detail.nodes.size()},
                    {"edges", g.hkg.detail.edges.size()},
                    {"report", g.report ? json(*g.report) : json(nullptr)}});
  }
  return {200, json{{"graphs", list}}};
}

Response Service::collection(const std::string& graph) const {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  json parts = json::array();
  for (const auto& p : g->hkg.collection) {
    json jp = p;
    for (auto& d : jp["documents"]) {
      d["central_concepts"] = g->hkg.has_document(d["id"].get<std::string>())
                                  ? g->hkg.minimap(d["id"].get<std::string>()).size()
                                  : 0;
    }
    parts.push_back(std::move(jp));
  }
  return {200, json{{"graph", graph}, {"partitions", parts}}};
}

Response Service::minimap(const std::string& graph, const std::string& doc) const {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  if (!g->hkg.has_document(doc)) return not_found("unknown_document");
  json mappings = json::object();
  if (auto it = g->hkg.mappings.find(doc); it != g->hkg.mappings.end()) {
    for (const auto& [c, ids] : it->second) mappings[c] = ids;
  }
  return {200, json{{"graph", graph},
                    {"document", doc},
                    {"concepts", g->hkg.minimap(doc)},
                    {"mappings", mappings}}};
}

Response Service::detail(const std::string& graph, const std::string& doc, bool visible_only) const {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  if (!g->hkg.has_document(doc)) return not_found("unknown_document");
  const KnowledgeGraph& kg = g->hkg.detail;
  const NodeSet visible = g->hkg.visible_nodes(doc, hide_threshold_);
  const auto central = g->hkg.central_ids(doc);

  json nodes = json::array();
  for (const auto& [id, n] : kg.nodes) {
    const bool shown = visible.count(id) != 0;
    if (visible_only && !shown) continue;
    nodes.push_back({{"id", id},
                     {"label", n.label},
                     {"degree", n.degree},
                     {"frequency", n.frequency_in(doc)},
                     {"visible", shown},
                     {"central", std::find(central.begin(), central.end(), id) != central.end()}});
  }
  json edges = json::array();
  std::size_t index = 0;
  for (const auto& [key, e] : kg.edges) {
    const bool shown = visible.count(key.first) && visible.count(key.second);
    if (!visible_only || shown) {
      edges.push_back({{"id", index},
                       {"source", key.first},
                       {"target", key.second},
                       {"relations", e.relations.size()},
                       {"in_document", e.anchored_in(doc)}});
    }
    ++index;
  }
  return {200, json{{"graph", graph},
                    {"document", doc},
                    {"hide_threshold", hide_threshold_},
                    {"nodes", nodes},
                    {"edges", edges}}};
}

Response Service::focus(const std::string& graph, const std::string& doc,
                        const std::string& concept_id) const {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  if (!g->hkg.has_document(doc)) return not_found("unknown_document");
  if (!g->hkg.detail.has_node(concept_id)) return not_found("unknown_node");
  FocusView view = focus_filter(g->hkg.detail, concept_id);
  return {200, json{{"graph", graph},
                    {"document", doc},
                    {"concept", concept_id},
                    {"saturated", view.saturated},
                    {"blended", view.blended}}};
}

Response Service::edge_relations(const std::string& graph, const std::string& edge) const {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  std::size_t index = 0;
  auto [p, ec] = std::from_chars(edge.data(), edge.data() + edge.size(), index);
  const KgEdge* e = (ec == std::errc() && p == edge.data() + edge.size())
                        ? g->hkg.detail.edge_at(index)
                        : nullptr;
  if (!e) return not_found("unknown_edge");
  json body = edge_to_json(g->hkg.detail, *e);
  for (auto& r : body["relations"]) {
    r["document_url"] = "/api/documents/" + r["anchor"]["doc_id"].get<std::string>() + "/text";
  }
  return {200, body};
}

Response Service::document_text(const std::string& doc) const {
  if (!corpus_ || !corpus_->contains(doc)) return not_found("unknown_document");
  const Document& d = corpus_->document(doc);
  return {200, json{{"id", d.doc_id}, {"title", d.title}, {"url", d.source_url}, {"body", d.body}}};
}

Response Service::expand(const std::string& graph, const std::string& doc, const json& body) {
  const GraphEntry* g = find_graph(graph);
  if (!g) return not_found("unknown_graph");
  if (!g->hkg.has_document(doc)) return not_found("unknown_document");
  if (!body.is_object() || !body.contains("session") || !body["session"].is_string() ||
      !body.contains("node") || !body["node"].is_string()) {
    return bad_request("expand body needs string fields 'session' and 'node'");
  }
  auto session = find_session(body["session"].get<std::string>());
  if (!session) return not_found("unknown_session");
  const std::string node = body["node"].get<std::string>();
  if (!g->hkg.detail.has_node(node)) return not_found("unknown_node");

  const NodeSet initial = g->hkg.visible_nodes(doc, hide_threshold_);
  std::lock_guard lock(session->mu);
  auto [it, _] = session->visible.try_emplace({graph, doc}, initial);
  NodeSet& visible = it->second;
  if (!visible.count(node)) return conflict("node_not_visible", "node is hidden: " + node);
  NodeSet next = expand_state(g->hkg.detail, visible, node, initial);
  const char* action = next.size() > visible.size()   ? "expand"
                       : next.size() < visible.size() ? "collapse"
                                                      : "none";
  visible = std::move(next);
  return {200, json{{"session", body["session"]},
                    {"graph", graph},
                    {"document", doc},
                    {"node", node},
                    {"action", action},
                    {"visible", visible}}};
}

Response Service::create_session() {
  std::lock_guard lock(sessions_mu_);
  std::string id = session_name(next_session_++);
  sessions_.emplace(id, std::make_shared<Session>());
  return {200, json{{"session_id", id}}};
}

Response Service::post_event(const json& body) {
  InteractionEvent event;
  try {
    event = parse_event_line(body.dump());
    validate_event(event);
  } catch (const std::exception& e) {
    return bad_request(e.what());
  }
  auto session = find_session(event.session);
  if (!session) return not_found("unknown_session");
  std::lock_guard lock(session->mu);
  if (!session->events.empty() && event.t_ms < session->events.back().t_ms) {
    return conflict("out_of_order", "t_ms goes backwards within session " + event.session);
  }
  if (log_) {
    std::lock_guard log_lock(log_mu_);
    try {
      log_->append(event);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kRejected) return conflict("out_of_order", e.what());
      throw;
    }
  }
  session->events.push_back(event);
  return {200, json{{"accepted", true}, {"session", event.session}, {"t_ms", event.t_ms}}};
}

Response Service::session_metrics(const std::string& id) const {
  auto session = find_session(id);
  if (!session) return not_found("unknown_session");
  std::vector<InteractionEvent> events;
  {
    std::lock_guard lock(session->mu);
    events = session->events;
  }
  // A running session is measured up to its latest event.
  const bool has_start = std::any_of(events.begin(), events.end(),
                                     [](const InteractionEvent& e) { return e.kind == "TaskStart"; });
  const bool has_end = std::any_of(events.begin(), events.end(),
                                   [](const InteractionEvent& e) { return e.kind == "TaskEnd"; });
  if (!has_start) events.insert(events.begin(), InteractionEvent{id, 0, "TaskStart", json::object()});
  if (!has_end) events.push_back({id, events.back().t_ms, "TaskEnd", json::object()});
  json body = hkg::session_metrics(events);
  body["session"] = id;
  body["complete"] = has_start && has_end;
  return {200, body};
}

struct HttpFrontend::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {}

  static void reply(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.text(), "application/json");
  }

  template <class F>
  static auto guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        reply(res, f(req));
      } catch (const Error& e) {
        int status = e.kind() == ErrorKind::kLookup ? 404 : e.kind() == ErrorKind::kState ? 409 : 500;
        reply(res, {status, json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}}});
      } catch (const std::exception& e) {
        reply(res, {500, json{{"error", "internal"}, {"message", e.what()}}});
      }
    };
  }

  static std::optional<json> parse_body(const httplib::Request& req) {
    try {
      return json::parse(req.body);
    } catch (const json::parse_error&) {
      return std::nullopt;
    }
  }

  void routes() {
    Service& s = service;
    server.Get("/api/graphs", guarded([&s](const httplib::Request&) { return s.list_graphs(); }));
    server.Get(R"(/api/graphs/([^/]+)/collection)", guarded([&s](const httplib::Request& r) {
                 return s.collection(r.matches[1]);
               }));
    server.Get(R"(/api/graphs/([^/]+)/documents/([^/]+)/minimap)",
               guarded([&s](const httplib::Request& r) { return s.minimap(r.matches[1], r.matches[2]); }));
    server.Get(R"(/api/graphs/([^/]+)/documents/([^/]+)/detail)",
               guarded([&s](const httplib::Request& r) {
                 const std::string flag = r.get_param_value("visible_only");
                 if (!flag.empty() && flag != "true" && flag != "false") {
                   return bad_request("visible_only must be true or false");
                 }
                 return s.detail(r.matches[1], r.matches[2], flag == "true");
               }));
    server.Get(R"(/api/graphs/([^/]+)/documents/([^/]+)/focus)",
               guarded([&s](const httplib::Request& r) {
                 if (!r.has_param("concept")) return bad_request("missing 'concept' parameter");
                 return s.focus(r.matches[1], r.matches[2], r.get_param_value("concept"));
               }));
    server.Post(R"(/api/graphs/([^/]+)/documents/([^/]+)/expand)",
                guarded([&s](const httplib::Request& r) {
                  auto body = parse_body(r);
                  if (!body) return bad_request("body is not JSON");
                  return s.expand(r.matches[1], r.matches[2], *body);
                }));
    server.Get(R"(/api/graphs/([^/]+)/edges/([^/]+)/relations)",
               guarded([&s](const httplib::Request& r) {
                 return s.edge_relations(r.matches[1], r.matches[2]);
               }));
    server.Get(R"(/api/documents/([^/]+)/text)",
               guarded([&s](const httplib::Request& r) { return s.document_text(r.matches[1]); }));
    server.Post("/api/sessions", guarded([&s](const httplib::Request&) { return s.create_session(); }));
    server.Post("/api/events", guarded([&s](const httplib::Request& r) {
                  auto body = parse_body(r);
                  if (!body) return bad_request("body is not JSON");
                  return s.post_event(*body);
                }));
    server.Get(R"(/api/sessions/([^/]+)/metrics)",
               guarded([&s](const httplib::Request& r) { return s.session_metrics(r.matches[1]); }));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        res.set_content(canonical_dump(json{{"error", "not_found"}}), "application/json");
      }
    });
  }
};

HttpFrontend::HttpFrontend(Service& service) : impl_(std::make_unique<Impl>(service)) {
  impl_->routes();
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host.c_str())
                        : (impl_->server.bind_to_port(host.c_str(), port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorKind::kState, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpFrontend::listen() { impl_->server.listen_after_bind(); }

void HttpFrontend::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void serve(const ServerConfig& config) {
  auto service = Service::from_directory(config.artifacts, config.log, config.hide_threshold);
  HttpFrontend frontend(*service);
  int port = frontend.bind(config.host, config.port);
  std::fprintf(stderr, "serving %zu graph(s) on http://%s:%d\n", service->graphs().size(),
               config.host.c_str(), port);
  frontend.listen();
}

}  // namespace hkg
