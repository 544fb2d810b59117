#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "hkg/analytics.hpp"
#include "hkg/corpus.hpp"
#include "hkg/extraction.hpp"
#include "hkg/graph.hpp"
#include "hkg/quality.hpp"

// JSON mappings for the domain types. Decoders validate structure and throw
// Error{kValidation} on schema violations.
namespace hkg {

void to_json(nlohmann::json& j, const Document& d);
void to_json(nlohmann::json& j, const Partition& p);
void to_json(nlohmann::json& j, const Anchor& a);
void to_json(nlohmann::json& j, const Tuple& t);
void to_json(nlohmann::json& j, const CentralConceptParams& p);
void to_json(nlohmann::json& j, const CentralConcept& c);
void to_json(nlohmann::json& j, const CollectionPartition& p);
void to_json(nlohmann::json& j, const KgNode& n);
void to_json(nlohmann::json& j, const QualityReport& r);
void to_json(nlohmann::json& j, const SessionMetrics& m);
void to_json(nlohmann::json& j, const AggregateReport& r);

nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);

nlohmann::json tuples_to_json(const TupleSet& tuples);
TupleSet tuples_from_json(const nlohmann::json& j);
Tuple tuple_from_json(const nlohmann::json& j);

// Edge objects carry their index as "id".
nlohmann::json edge_to_json(const KnowledgeGraph& kg, const KgEdge& edge);
nlohmann::json graph_to_json(const KnowledgeGraph& kg);
KnowledgeGraph graph_from_json(const nlohmann::json& j);

nlohmann::json hkg_to_json(const Hkg& hkg);
Hkg hkg_from_json(const nlohmann::json& j);

// Counts are authoritative; precision and recall are recomputed from them.
QualityReport report_from_json(const nlohmann::json& j);

// JSON Lines export, one tuple per line.
std::string tuples_to_jsonl(const TupleSet& tuples);

}  // namespace hkg
