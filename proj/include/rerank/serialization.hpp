#pragma once

#include <string>

#include <json.hpp>

#include "rerank/core.hpp"

namespace rerank {

/// Shortest decimal representation that round-trips to the same double.
std::string shortest_double(double value);

nlohmann::ordered_json doc_id_to_json(const DocId& id);
DocId doc_id_from_json(const nlohmann::json& j);

nlohmann::ordered_json metadata_to_json(const Metadata& metadata);
Metadata metadata_from_json(const nlohmann::json& j);

/// Canonical serialization used by the CLI and the service:
/// {"query", "has_scores", "results": [{"doc_id", "text", "metadata",
///  "score" (omitted when has_scores = false), "rank"}]}.
nlohmann::ordered_json to_canonical_json(const RankedResults& results);
std::string to_canonical_string(const RankedResults& results);

RankedResults ranked_results_from_json(const nlohmann::json& j);

}  // namespace rerank
