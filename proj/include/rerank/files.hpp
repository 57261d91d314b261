#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rerank/core.hpp"

namespace rerank {

/// One JSONL record: {"doc_id": int|str, "text": str, "metadata": {..}?}.
/// `require_doc_id` is false for service payloads, where ids may be omitted
/// together and default to positions.
Document document_from_json(const nlohmann::json& j, bool require_doc_id = true);

/// Loads a JSONL corpus; doc_id required and unique per file. Errors carry
/// the 1-based line number.
std::vector<Document> load_documents_jsonl(const std::string& path);

struct QueryRecord {
    std::string query_id;
    std::string query;
};

/// JSONL of {"query_id": str, "query": str}.
std::vector<QueryRecord> load_queries_jsonl(const std::string& path);

/// One run-file line: query_id<TAB>doc_id. Doc ids are matched against the
/// corpus by canonical text form.
struct RunEntry {
    std::string query_id;
    std::string doc_id;
};

std::vector<RunEntry> load_run_file(const std::string& path);

/// One service-config line: <model-type alias> <provider> [model_ref].
/// provider is "reference" or "external"; model_ref defaults per manifest.
struct ServiceModelEntry {
    std::string alias;
    std::string provider;
    std::string model_ref;  ///< empty means use default_model_for
};

std::vector<ServiceModelEntry> load_service_config(const std::string& path);

}  // namespace rerank
