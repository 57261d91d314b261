#include "rerank/files.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rerank/serialization.hpp"

namespace rerank {

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidRecord("cannot open file '" + path + "'");
    }
    return in;
}

[[noreturn]] void line_error(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw InvalidRecord(path + ":" + std::to_string(line_no) + ": " + what);
}

bool blank(const std::string& line) {
    return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Document document_from_json(const nlohmann::json& j, bool require_doc_id) {
    if (!j.is_object()) {
        throw InvalidRecord("document record must be a JSON object");
    }
    if (!j.contains("text") || !j["text"].is_string()) {
        throw InvalidRecord("document record needs a string 'text' field");
    }
    Document doc;
    doc.text = j["text"].get<std::string>();
    if (j.contains("doc_id")) {
        doc.doc_id = doc_id_from_json(j["doc_id"]);
    } else if (require_doc_id) {
        throw InvalidRecord("document record needs a 'doc_id' field");
    }
    if (j.contains("metadata") && !j["metadata"].is_null()) {
        doc.metadata = metadata_from_json(j["metadata"]);
    }
    return doc;
}

std::vector<Document> load_documents_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<Document> docs;
    std::set<DocId> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            line_error(path, line_no, std::string("invalid JSON: ") + e.what());
        }
        try {
            Document doc = document_from_json(record, /*require_doc_id=*/true);
            if (!seen.insert(doc.doc_id).second) {
                line_error(path, line_no,
                           "duplicate doc_id '" + canonical_doc_id(doc.doc_id) + "'");
            }
            docs.push_back(std::move(doc));
        } catch (const Error& e) {
            line_error(path, line_no, e.detail());
        }
    }
    return docs;
}

std::vector<QueryRecord> load_queries_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<QueryRecord> queries;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            line_error(path, line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!record.is_object() || !record.contains("query_id") ||
            !record["query_id"].is_string() || !record.contains("query") ||
            !record["query"].is_string()) {
            line_error(path, line_no, "expected {\"query_id\": str, \"query\": str}");
        }
        QueryRecord q{record["query_id"].get<std::string>(), record["query"].get<std::string>()};
        if (!seen.insert(q.query_id).second) {
            line_error(path, line_no, "duplicate query_id '" + q.query_id + "'");
        }
        queries.push_back(std::move(q));
    }
    return queries;
}

std::vector<RunEntry> load_run_file(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<RunEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (blank(line)) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
            line_error(path, line_no, "expected 'query_id<TAB>doc_id'");
        }
        entries.push_back(RunEntry{line.substr(0, tab), line.substr(tab + 1)});
    }
    return entries;
}

std::vector<ServiceModelEntry> load_service_config(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<ServiceModelEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (blank(line)) continue;
        std::istringstream fields(line);
        ServiceModelEntry entry;
        fields >> entry.alias >> entry.provider;
        if (entry.alias.empty() || entry.provider.empty()) {
            line_error(path, line_no, "expected '<alias> <provider> [model_ref]'");
        }
        fields >> entry.model_ref;  // optional
        if (entry.model_ref == "-") entry.model_ref.clear();
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) {
        throw InvalidRecord("service config '" + path + "' lists no models");
    }
    return entries;
}

}  // namespace rerank
