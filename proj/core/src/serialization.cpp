#include "hkg/serialization.hpp"

#include "hkg/canonical_json.hpp"
#include "hkg/error.hpp"

namespace hkg {
namespace {

using nlohmann::json;

constexpr int kHkgSchemaVersion = 1;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorKind::kValidation, "invalid artifact payload: " + what);
}

const json& field(const json& j, const char* key) {
  if (!j.is_object()) invalid(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) invalid(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string("field '") + key + "': " + e.what());
  }
}

// Runs a decoder, mapping library type errors onto validation errors.
template <class F>
auto decoding(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    invalid(std::string(what) + ": " + e.what());
  }
}

Anchor anchor_from_json(const json& j) {
  Anchor a;
  a.doc_id = get<std::string>(j, "doc_id");
  a.span = {get<std::size_t>(j, "start"), get<std::size_t>(j, "end")};
  if (a.span.end < a.span.start) invalid("anchor end before start");
  return a;
}

}  // namespace

void to_json(json& j, const Document& d) {
  json spans = json::array();
  for (const auto& s : d.sentence_spans) spans.push_back({s.start, s.end});
  j = json{{"id", d.doc_id},       {"title", d.title},
           {"url", d.source_url},  {"body", d.body},
           {"sentences", spans},   {"rank", d.rank},
           {"partition", d.partition_id}};
}

void to_json(json& j, const Partition& p) {
  j = json{{"id", p.partition_id}, {"query", p.query}, {"documents", p.documents}};
}

void to_json(json& j, const Anchor& a) {
  j = json{{"doc_id", a.doc_id}, {"start", a.span.start}, {"end", a.span.end}};
}

void to_json(json& j, const Tuple& t) {
  j = json{{"entity1", t.entity1}, {"entity2", t.entity2}, {"relation", t.relation},
           {"snippet", t.snippet}, {"anchor", t.anchor},   {"salience", t.salience}};
}

void to_json(json& j, const CentralConceptParams& p) {
  j = json{{"min_degree", p.min_degree}, {"max_count", p.max_count}, {"relax_ties", p.relax_ties}};
}

void to_json(json& j, const CentralConcept& c) {
  j = json{{"entity", c.entity}, {"degree", c.degree}, {"frequency", c.frequency}};
}

void to_json(json& j, const CollectionPartition& p) {
  json docs = json::array();
  for (const auto& d : p.documents) {
    docs.push_back({{"id", d.doc_id}, {"title", d.title}, {"url", d.source_url}, {"rank", d.rank}});
  }
  j = json{{"id", p.partition_id}, {"query", p.query}, {"documents", docs}};
}

void to_json(json& j, const KgNode& n) {
  j = json{{"id", n.entity}, {"label", n.label}, {"degree", n.degree}, {"frequency", n.frequency}};
}

void to_json(json& j, const QualityReport& r) {
  j = json{{"precision", r.precision},
           {"recall", r.recall},
           {"matched", r.matched},
           {"system_size", r.system_size},
           {"gold_size", r.gold_size}};
}

void to_json(json& j, const SessionMetrics& m) {
  json rows = json::array();
  for (const auto& r : m.heatmap.rows) rows.push_back(r);
  j = json{{"session", m.session},
           {"nc", m.nc},
           {"ec", m.ec},
           {"v", m.v},
           {"vt_s", m.vt_s},
           {"duration_s", m.duration_s},
           {"view_fractions", m.view_fractions},
           {"heatmap", {{"views", {"Global", "MiniMap", "Detailed"}}, {"rows", rows}}}};
}

void to_json(json& j, const AggregateReport& r) {
  json fields = json::object();
  for (const auto& [name, f] : r.fields) fields[name] = {{"mean", f.mean}, {"std", f.std}};
  j = json{{"sessions", r.sessions}, {"single_session", r.single_session}, {"fields", fields}};
}

json corpus_to_json(const Corpus& corpus) {
  return json{{"partitions", corpus.partitions()}, {"documents", corpus.documents()}};
}

Corpus corpus_from_json(const json& j) {
  return decoding("corpus", [&] {
    std::vector<Partition> parts;
    for (const auto& p : field(j, "partitions")) {
      parts.push_back({get<std::string>(p, "id"), get<std::string>(p, "query"),
                       get<std::vector<std::string>>(p, "documents")});
    }
    std::vector<Document> docs;
    for (const auto& d : field(j, "documents")) {
      Document doc;
      doc.doc_id = get<std::string>(d, "id");
      doc.title = get<std::string>(d, "title");
      doc.source_url = get<std::string>(d, "url");
      doc.body = get<std::string>(d, "body");
      doc.rank = get<int>(d, "rank");
      doc.partition_id = get<std::string>(d, "partition");
      std::size_t prev_end = 0;
      for (const auto& s : field(d, "sentences")) {
        SentenceSpan span{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
        if (span.start < prev_end || span.end < span.start || span.end > doc.body.size()) {
          invalid("bad sentence span in document " + doc.doc_id);
        }
        prev_end = span.end;
        doc.sentence_spans.push_back(span);
      }
      if (doc.rank < 1) invalid("rank must be >= 1 in document " + doc.doc_id);
      docs.push_back(std::move(doc));
    }
    return Corpus(std::move(parts), std::move(docs));
  });
}

json tuples_to_json(const TupleSet& tuples) { return json{{"tuples", tuples}}; }

Tuple tuple_from_json(const json& j) {
  return decoding("tuple", [&] {
    Tuple t;
    t.entity1 = get<std::string>(j, "entity1");
    t.entity2 = get<std::string>(j, "entity2");
    t.relation = get<std::string>(j, "relation");
    t.snippet = get<std::string>(j, "snippet");
    t.anchor = anchor_from_json(field(j, "anchor"));
    t.salience = get<std::uint64_t>(j, "salience");
    if (t.entity1 == t.entity2) invalid("tuple relates entity to itself: " + t.entity1);
    return t;
  });
}

TupleSet tuples_from_json(const json& j) {
  TupleSet out;
  for (const auto& t : field(j, "tuples")) out.push_back(tuple_from_json(t));
  return out;
}

json edge_to_json(const KnowledgeGraph& kg, const KgEdge& edge) {
  json rels = json::array();
  for (const auto& r : edge.relations) {
    rels.push_back({{"relation", r.relation},
                    {"snippet", r.snippet},
                    {"anchor", r.anchor},
                    {"salience", r.salience}});
  }
  return json{{"id", kg.edge_index(edge.endpoints).value_or(0)},
              {"source", edge.endpoints.first},
              {"target", edge.endpoints.second},
              {"relations", rels}};
}

json graph_to_json(const KnowledgeGraph& kg) {
  json nodes = json::array();
  for (const auto& [_, n] : kg.nodes) nodes.push_back(n);
  json edges = json::array();
  for (const auto& [_, e] : kg.edges) edges.push_back(edge_to_json(kg, e));
  return json{{"documents", kg.documents}, {"nodes", nodes}, {"edges", edges}};
}

KnowledgeGraph graph_from_json(const json& j) {
  return decoding("graph", [&] {
    KnowledgeGraph kg;
    kg.documents = get<std::set<std::string>>(j, "documents");
    for (const auto& n : field(j, "nodes")) {
      KgNode node;
      node.entity = get<std::string>(n, "id");
      node.label = get<std::string>(n, "label");
      node.degree = get<std::size_t>(n, "degree");
      node.frequency = get<std::map<std::string, std::uint64_t>>(n, "frequency");
      if (!kg.nodes.emplace(node.entity, node).second) invalid("duplicate node " + node.entity);
    }
    for (const auto& e : field(j, "edges")) {
      const auto a = get<std::string>(e, "source");
      const auto b = get<std::string>(e, "target");
      if (a == b || !kg.nodes.count(a) || !kg.nodes.count(b)) {
        invalid("edge endpoints must be two distinct known nodes");
      }
      KgEdge edge{make_edge_key(a, b), {}};
      for (const auto& r : field(e, "relations")) {
        edge.relations.push_back({get<std::string>(r, "relation"), get<std::string>(r, "snippet"),
                                  anchor_from_json(field(r, "anchor")),
                                  get<std::uint64_t>(r, "salience")});
      }
      if (edge.relations.empty()) invalid("edge without relations");
      if (!kg.edges.emplace(edge.endpoints, edge).second) invalid("duplicate edge");
    }
    KnowledgeGraph check = kg;
    check.recompute_degrees();
    if (check != kg) invalid("node degrees disagree with the edge set");
    return kg;
  });
}

json hkg_to_json(const Hkg& hkg) {
  json minimaps = json::object();
  for (const auto& [doc, concepts] : hkg.minimaps) minimaps[doc] = concepts;
  json mappings = json::object();
  for (const auto& [doc, per_concept] : hkg.mappings) {
    json m = json::object();
    for (const auto& [c, ids] : per_concept) m[c] = ids;
    mappings[doc] = m;
  }
  return json{{"format_version", kHkgSchemaVersion},
              {"params", hkg.params},
              {"collection", hkg.collection},
              {"minimaps", minimaps},
              {"detail", graph_to_json(hkg.detail)},
              {"mappings", mappings}};
}

Hkg hkg_from_json(const json& j) {
  return decoding("hkg", [&] {
    if (get<int>(j, "format_version") != kHkgSchemaVersion) invalid("unsupported hkg schema version");
    Hkg h;
    const json& p = field(j, "params");
    h.params.min_degree = get<std::size_t>(p, "min_degree");
    h.params.max_count = get<std::size_t>(p, "max_count");
    h.params.relax_ties = get<bool>(p, "relax_ties");
    for (const auto& cp : field(j, "collection")) {
      CollectionPartition part{get<std::string>(cp, "id"), get<std::string>(cp, "query"), {}};
      for (const auto& d : field(cp, "documents")) {
        part.documents.push_back({get<std::string>(d, "id"), get<std::string>(d, "title"),
                                  get<std::string>(d, "url"), get<int>(d, "rank")});
      }
      h.collection.push_back(std::move(part));
    }
    h.detail = graph_from_json(field(j, "detail"));
    for (const auto& [doc, list] : field(j, "minimaps").items()) {
      auto& concepts = h.minimaps[doc];
      for (const auto& c : list) {
        concepts.push_back({get<std::string>(c, "entity"), get<std::size_t>(c, "degree"),
                            get<std::uint64_t>(c, "frequency")});
        if (!h.detail.has_node(concepts.back().entity)) invalid("minimap entity not in graph");
      }
      if (concepts.size() > h.params.max_count) invalid("minimap exceeds max_count");
    }
    for (const auto& [doc, per_concept] : field(j, "mappings").items()) {
      h.mappings[doc];  // documents without concepts keep an empty entry
      for (const auto& [c, ids] : per_concept.items()) {
        auto targets = ids.get<NodeSet>();
        for (const auto& t : targets) {
          if (!h.detail.has_node(t)) invalid("mapping target not in graph: " + t);
        }
        h.mappings[doc][c] = std::move(targets);
      }
    }
    return h;
  });
}

QualityReport report_from_json(const json& j) {
  return decoding("report", [&] {
    auto r = QualityReport::from_counts(get<std::size_t>(j, "matched"),
                                        get<std::size_t>(j, "system_size"),
                                        get<std::size_t>(j, "gold_size"));
    if (r.matched > r.system_size || r.matched > r.gold_size) invalid("matched exceeds set size");
    return r;
  });
}

std::string tuples_to_jsonl(const TupleSet& tuples) {
  std::string out;
  for (const auto& t : tuples) {
    out += canonical_dump(json(t));
    out += '\n';
  }
  return out;
}

}  // namespace hkg
