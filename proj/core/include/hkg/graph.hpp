#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hkg/corpus.hpp"
#include "hkg/extraction.hpp"

namespace hkg {

using NodeSet = std::set<EntityId>;

struct RelationRecord {
  std::string relation;
  std::string snippet;
  Anchor anchor;
  std::uint64_t salience = 0;

  bool operator==(const RelationRecord&) const = default;
};

struct KgNode {
  EntityId entity;
  std::string label;
  std::size_t degree = 0;
  // Number of distinct sentences per document in which the entity takes part
  // in a tuple.
  std::map<DocId, std::uint64_t> frequency;

  std::uint64_t frequency_in(std::string_view doc_id) const;
  bool operator==(const KgNode&) const = default;
};

// Endpoints are stored ordered (first < second).
using EdgeKey = std::pair<EntityId, EntityId>;
EdgeKey make_edge_key(const EntityId& a, const EntityId& b);

struct KgEdge {
  EdgeKey endpoints;
  std::vector<RelationRecord> relations;

  bool anchored_in(std::string_view doc_id) const;
  bool operator==(const KgEdge&) const = default;
};

class KnowledgeGraph {
 public:
  std::map<EntityId, KgNode> nodes;
  std::map<EdgeKey, KgEdge> edges;
  // Documents the graph knows about, including ones that produced no tuples.
  std::set<DocId> documents;

  bool has_node(std::string_view id) const;
  const KgNode& node(std::string_view id) const;  // throws kLookup
  NodeSet neighbors(std::string_view id) const;

  // Position of an edge in key order; the stable public edge id.
  std::optional<std::size_t> edge_index(const EdgeKey& key) const;
  const KgEdge* edge_at(std::size_t index) const;

  std::size_t degree_sum() const;
  // Sets every node's degree from the edge set.
  void recompute_degrees();

  bool operator==(const KnowledgeGraph&) const = default;
};

KnowledgeGraph build_kg(const TupleSet& tuples);

// Inverse of build_kg: one tuple per relation record, canonical order.
TupleSet graph_tuples(const KnowledgeGraph& kg);

// Edges with at least one relation anchored in `doc_id`, keeping only those
// relations; degrees recomputed. Throws kLookup for a document the graph
// does not know.
KnowledgeGraph document_subgraph(const KnowledgeGraph& kg, std::string_view doc_id);

struct CentralConceptParams {
  std::size_t min_degree = 3;
  std::size_t max_count = 15;
  // Instead of collapsing to an empty set when a degree tie straddles
  // max_count, keep the max_count best (degree desc, entity asc).
  bool relax_ties = false;

  void validate() const;
  bool operator==(const CentralConceptParams&) const = default;
};

struct NodeDegree {
  EntityId entity;
  std::size_t degree = 0;
};

struct CentralConcept {
  EntityId entity;
  std::size_t degree = 0;
  std::uint64_t frequency = 0;

  bool operator==(const CentralConcept&) const = default;
};

// Iterative degree thresholding: raise the threshold from min_degree until
// no more than max_count nodes remain. Sorted (degree desc, entity asc).
std::vector<CentralConcept> extract_central_concepts(const std::vector<NodeDegree>& nodes,
                                                     const CentralConceptParams& params = {});

struct CollectionDocument {
  DocId doc_id;
  std::string title;
  std::string source_url;
  int rank = 1;

  bool operator==(const CollectionDocument&) const = default;
};

struct CollectionPartition {
  std::string partition_id;
  std::string query;
  std::vector<CollectionDocument> documents;

  bool operator==(const CollectionPartition&) const = default;
};

std::vector<CollectionPartition> collection_of(const Corpus& corpus);

struct FocusView {
  NodeSet saturated;
  NodeSet blended;
};

class Hkg {
 public:
  static constexpr std::size_t kDefaultHideThreshold = 2;

  CentralConceptParams params;
  std::vector<CollectionPartition> collection;
  std::map<DocId, std::vector<CentralConcept>> minimaps;
  KnowledgeGraph detail;
  // doc -> concept -> closed neighborhood in the document subgraph.
  std::map<DocId, std::map<EntityId, NodeSet>> mappings;

  bool has_document(std::string_view doc_id) const;
  const std::vector<CentralConcept>& minimap(std::string_view doc_id) const;  // throws kLookup
  std::vector<EntityId> central_ids(std::string_view doc_id) const;
  NodeSet visible_nodes(std::string_view doc_id,
                        std::size_t hide_threshold = kDefaultHideThreshold) const;

  bool operator==(const Hkg&) const = default;
};

Hkg build_hkg(std::vector<CollectionPartition> collection, const TupleSet& tuples,
              const CentralConceptParams& params = {});
Hkg build_hkg(const Corpus& corpus, const TupleSet& tuples,
              const CentralConceptParams& params = {});

// Nodes whose frequency in `doc_id` reaches the threshold, plus the listed
// central concepts.
NodeSet visible_nodes(const KnowledgeGraph& kg, std::string_view doc_id,
                      std::size_t hide_threshold,
                      const std::vector<EntityId>& central_concepts = {});

// Closed neighborhood saturated, everything else blended. Throws kLookup.
FocusView focus_filter(const KnowledgeGraph& kg, std::string_view concept_id);

// Click on a visible node. Expands when any neighbor is hidden; otherwise
// collapses the neighbors that have no other visible neighbor. `pinned`
// nodes (e.g. the initial view) are never collapsed. Throws kState when
// `clicked` is not visible.
NodeSet expand_state(const KnowledgeGraph& kg, const NodeSet& visible,
                     std::string_view clicked, const NodeSet& pinned = {});

}  // namespace hkg
