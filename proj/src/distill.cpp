#include "rerank/distill.hpp"

#include <map>
#include <ostream>

#include "rerank/serialization.hpp"

namespace rerank {

std::vector<ScoredPair> compute_distillation_scores(const std::vector<QueryRecord>& queries,
                                                    const std::vector<RunEntry>& run,
                                                    const std::vector<Document>& corpus,
                                                    const Reranker& handle) {
    std::map<std::string, const QueryRecord*> query_by_id;
    for (const QueryRecord& q : queries) {
        query_by_id.emplace(q.query_id, &q);
    }
    std::map<std::string, const Document*> doc_by_id;
    for (const Document& doc : corpus) {
        doc_by_id.emplace(canonical_doc_id(doc.doc_id), &doc);
    }

    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<ScoredPair> out;
    pairs.reserve(run.size());
    out.reserve(run.size());
    for (std::size_t i = 0; i < run.size(); ++i) {
        const auto query_it = query_by_id.find(run[i].query_id);
        if (query_it == query_by_id.end()) {
            throw InvalidRecord("run entry " + std::to_string(i + 1) + ": query_id '" +
                                run[i].query_id + "' is not in the query file");
        }
        const auto doc_it = doc_by_id.find(run[i].doc_id);
        if (doc_it == doc_by_id.end()) {
            throw InvalidRecord("run entry " + std::to_string(i + 1) + ": doc_id '" +
                                run[i].doc_id + "' is not in the document corpus");
        }
        pairs.emplace_back(query_it->second->query, doc_it->second->text);
        out.push_back(ScoredPair{run[i].query_id, doc_it->second->doc_id, 0.0});
    }

    const std::vector<double> scores = handle.score_pairs(pairs);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].score = scores[i];
    }
    return out;
}

void write_scored_pairs(std::ostream& out, const std::vector<ScoredPair>& pairs,
                        ExportFormat format) {
    for (const ScoredPair& pair : pairs) {
        if (format == ExportFormat::Tsv) {
            out << pair.query_id << '\t' << canonical_doc_id(pair.doc_id) << '\t'
                << shortest_double(pair.score) << '\n';
        } else {
            nlohmann::ordered_json line;
            line["query_id"] = pair.query_id;
            line["doc_id"] = doc_id_to_json(pair.doc_id);
            line["score"] = pair.score;
            out << line.dump() << '\n';
        }
    }
}

void export_distillation(const std::string& queries_path, const std::string& run_path,
                         const std::string& docs_path, const Reranker& handle,
                         std::ostream& out, ExportFormat format) {
    const auto queries = load_queries_jsonl(queries_path);
    const auto run = load_run_file(run_path);
    const auto corpus = load_documents_jsonl(docs_path);
    write_scored_pairs(out, compute_distillation_scores(queries, run, corpus, handle), format);
}

}  // namespace rerank
