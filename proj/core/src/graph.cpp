#include "hkg/graph.hpp"

#include <algorithm>
#include <iterator>
#include <tuple>

#include "hkg/error.hpp"

namespace hkg {

std::uint64_t KgNode::frequency_in(std::string_view doc_id) const {
  auto it = frequency.find(std::string(doc_id));
  return it == frequency.end() ? 0 : it->second;
}

EdgeKey make_edge_key(const EntityId& a, const EntityId& b) {
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

bool KgEdge::anchored_in(std::string_view doc_id) const {
  return std::any_of(relations.begin(), relations.end(),
                     [&](const RelationRecord& r) { return r.anchor.doc_id == doc_id; });
}

bool KnowledgeGraph::has_node(std::string_view id) const {
  return nodes.count(std::string(id)) != 0;
}

const KgNode& KnowledgeGraph::node(std::string_view id) const {
  auto it = nodes.find(std::string(id));
  if (it == nodes.end()) {
    throw Error(ErrorKind::kLookup, "unknown node: " + std::string(id));
  }
  return it->second;
}

NodeSet KnowledgeGraph::neighbors(std::string_view id) const {
  NodeSet out;
  for (const auto& [key, edge] : edges) {
    if (key.first == id) out.insert(key.second);
    else if (key.second == id) out.insert(key.first);
  }
  return out;
}

std::optional<std::size_t> KnowledgeGraph::edge_index(const EdgeKey& key) const {
  auto it = edges.find(key);
  if (it == edges.end()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(edges.begin(), it));
}

const KgEdge* KnowledgeGraph::edge_at(std::size_t index) const {
  if (index >= edges.size()) return nullptr;
  return &std::next(edges.begin(), static_cast<std::ptrdiff_t>(index))->second;
}

std::size_t KnowledgeGraph::degree_sum() const {
  std::size_t sum = 0;
  for (const auto& [_, n] : nodes) sum += n.degree;
  return sum;
}

void KnowledgeGraph::recompute_degrees() {
  for (auto& [_, n] : nodes) n.degree = 0;
  for (const auto& [key, _] : edges) {
    ++nodes.at(key.first).degree;
    ++nodes.at(key.second).degree;
  }
}

KnowledgeGraph build_kg(const TupleSet& tuples) {
  KnowledgeGraph kg;
  std::map<EntityId, std::map<DocId, std::set<SentenceSpan>>> sentences;
  for (const auto& t : tuples) {
    if (t.entity1 == t.entity2) {
      throw Error(ErrorKind::kValidation, "tuple relates entity to itself: " + t.entity1);
    }
    for (const EntityId* e : {&t.entity1, &t.entity2}) {
      auto [it, inserted] = kg.nodes.try_emplace(*e);
      if (inserted) {
        it->second.entity = *e;
        it->second.label = *e;
      }
      sentences[*e][t.anchor.doc_id].insert(t.anchor.span);
    }
    kg.documents.insert(t.anchor.doc_id);

    EdgeKey key = make_edge_key(t.entity1, t.entity2);
    KgEdge& edge = kg.edges[key];
    edge.endpoints = key;
    bool duplicate = std::any_of(edge.relations.begin(), edge.relations.end(),
                                 [&](const RelationRecord& r) {
                                   return r.relation == t.relation && r.anchor == t.anchor;
                                 });
    if (!duplicate) edge.relations.push_back({t.relation, t.snippet, t.anchor, t.salience});
  }
  for (auto& [_, edge] : kg.edges) {
    std::sort(edge.relations.begin(), edge.relations.end(),
              [](const RelationRecord& a, const RelationRecord& b) {
                return std::tie(a.anchor, a.relation) < std::tie(b.anchor, b.relation);
              });
  }
  for (auto& [entity, per_doc] : sentences) {
    auto& freq = kg.nodes.at(entity).frequency;
    for (const auto& [doc, spans] : per_doc) freq[doc] = spans.size();
  }
  kg.recompute_degrees();
  return kg;
}

TupleSet graph_tuples(const KnowledgeGraph& kg) {
  TupleSet out;
  for (const auto& [key, edge] : kg.edges) {
    for (const auto& r : edge.relations) {
      out.push_back({key.first, key.second, r.relation, r.snippet, r.anchor, r.salience});
    }
  }
  sort_canonical(out);
  return out;
}

KnowledgeGraph document_subgraph(const KnowledgeGraph& kg, std::string_view doc_id) {
  const std::string doc(doc_id);
  if (!kg.documents.count(doc)) {
    throw Error(ErrorKind::kLookup, "unknown document: " + doc);
  }
  KnowledgeGraph sub;
  sub.documents.insert(doc);
  for (const auto& [key, edge] : kg.edges) {
    KgEdge kept{key, {}};
    for (const auto& r : edge.relations) {
      if (r.anchor.doc_id == doc) kept.relations.push_back(r);
    }
    if (kept.relations.empty()) continue;
    sub.nodes.try_emplace(key.first, kg.nodes.at(key.first));
    sub.nodes.try_emplace(key.second, kg.nodes.at(key.second));
    sub.edges.emplace(key, std::move(kept));
  }
  sub.recompute_degrees();
  return sub;
}

void CentralConceptParams::validate() const {
  if (min_degree < 1) {
    throw Error(ErrorKind::kValidation, "min_degree must be >= 1");
  }
}

std::vector<CentralConcept> extract_central_concepts(const std::vector<NodeDegree>& nodes,
                                                     const CentralConceptParams& params) {
  params.validate();
  auto ranked = [](std::vector<CentralConcept> v) {
    std::sort(v.begin(), v.end(), [](const CentralConcept& a, const CentralConcept& b) {
      if (a.degree != b.degree) return a.degree > b.degree;
      return a.entity < b.entity;
    });
    return v;
  };

  if (params.relax_ties) {
    std::vector<CentralConcept> candidates;
    for (const auto& n : nodes) {
      if (n.degree >= params.min_degree) candidates.push_back({n.entity, n.degree, 0});
    }
    candidates = ranked(std::move(candidates));
    if (candidates.size() > params.max_count) candidates.resize(params.max_count);
    return candidates;
  }

  // Terminates: once the threshold exceeds the largest degree the set is
  // empty, and 0 <= max_count.
  std::size_t min_degree = params.min_degree;
  while (true) {
    std::vector<CentralConcept> central;
    for (const auto& n : nodes) {
      if (n.degree >= min_degree) central.push_back({n.entity, n.degree, 0});
    }
    if (central.size() <= params.max_count) return ranked(std::move(central));
    ++min_degree;
  }
}

std::vector<CollectionPartition> collection_of(const Corpus& corpus) {
  std::vector<CollectionPartition> out;
  for (const auto& p : corpus.partitions()) {
    CollectionPartition cp{p.partition_id, p.query, {}};
    for (const auto& id : p.documents) {
      const Document& d = corpus.document(id);
      cp.documents.push_back({d.doc_id, d.title, d.source_url, d.rank});
    }
    out.push_back(std::move(cp));
  }
  return out;
}

bool Hkg::has_document(std::string_view doc_id) const {
  return minimaps.count(std::string(doc_id)) != 0;
}

const std::vector<CentralConcept>& Hkg::minimap(std::string_view doc_id) const {
  auto it = minimaps.find(std::string(doc_id));
  if (it == minimaps.end()) {
    throw Error(ErrorKind::kLookup, "unknown document: " + std::string(doc_id));
  }
  return it->second;
}

std::vector<EntityId> Hkg::central_ids(std::string_view doc_id) const {
  std::vector<EntityId> ids;
  for (const auto& c : minimap(doc_id)) ids.push_back(c.entity);
  return ids;
}

NodeSet Hkg::visible_nodes(std::string_view doc_id, std::size_t hide_threshold) const {
  return hkg::visible_nodes(detail, doc_id, hide_threshold, central_ids(doc_id));
}

Hkg build_hkg(std::vector<CollectionPartition> collection, const TupleSet& tuples,
              const CentralConceptParams& params) {
  params.validate();
  Hkg hkg;
  hkg.params = params;
  hkg.detail = build_kg(tuples);
  for (const auto& p : collection) {
    for (const auto& d : p.documents) hkg.detail.documents.insert(d.doc_id);
  }
  hkg.collection = std::move(collection);

  for (const auto& doc : hkg.detail.documents) {
    const KnowledgeGraph sub = document_subgraph(hkg.detail, doc);
    std::vector<NodeDegree> degrees;
    degrees.reserve(sub.nodes.size());
    for (const auto& [id, n] : sub.nodes) degrees.push_back({id, n.degree});

    auto concepts = extract_central_concepts(degrees, params);
    auto& mapping = hkg.mappings[doc];
    for (auto& c : concepts) {
      c.frequency = hkg.detail.node(c.entity).frequency_in(doc);
      NodeSet closed = sub.neighbors(c.entity);
      closed.insert(c.entity);
      mapping.emplace(c.entity, std::move(closed));
    }
    hkg.minimaps.emplace(doc, std::move(concepts));
  }
  return hkg;
}

Hkg build_hkg(const Corpus& corpus, const TupleSet& tuples,
              const CentralConceptParams& params) {
  return build_hkg(collection_of(corpus), tuples, params);
}

NodeSet visible_nodes(const KnowledgeGraph& kg, std::string_view doc_id,
                      std::size_t hide_threshold,
                      const std::vector<EntityId>& central_concepts) {
  NodeSet out;
  for (const auto& [id, n] : kg.nodes) {
    if (n.frequency_in(doc_id) >= hide_threshold) out.insert(id);
  }
  for (const auto& c : central_concepts) {
    if (kg.has_node(c)) out.insert(c);
  }
  return out;
}

FocusView focus_filter(const KnowledgeGraph& kg, std::string_view concept_id) {
  if (!kg.has_node(concept_id)) {
    throw Error(ErrorKind::kLookup, "unknown concept: " + std::string(concept_id));
  }
  FocusView view;
  view.saturated = kg.neighbors(concept_id);
  view.saturated.insert(std::string(concept_id));
  for (const auto& [id, _] : kg.nodes) {
    if (!view.saturated.count(id)) view.blended.insert(id);
  }
  return view;
}

NodeSet expand_state(const KnowledgeGraph& kg, const NodeSet& visible,
                     std::string_view clicked, const NodeSet& pinned) {
  const std::string target(clicked);
  if (!visible.count(target)) {
    throw Error(ErrorKind::kState, "node is not visible: " + target);
  }
  const NodeSet around = kg.neighbors(target);
  NodeSet next = visible;
  bool any_hidden = std::any_of(around.begin(), around.end(),
                                [&](const EntityId& n) { return !visible.count(n); });
  if (any_hidden) {
    next.insert(around.begin(), around.end());
    return next;
  }
  for (const auto& n : around) {
    if (pinned.count(n)) continue;
    const NodeSet others = kg.neighbors(n);
    bool anchored_elsewhere = std::any_of(others.begin(), others.end(), [&](const EntityId& m) {
      return m != target && visible.count(m);
    });
    if (!anchored_elsewhere) next.erase(n);
  }
  return next;
}

}  // namespace hkg
