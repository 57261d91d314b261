#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rerank/core.hpp"
#include "rerank/files.hpp"
#include "rerank/registry.hpp"

namespace rerank {

/// (query id, doc id, score) triple for distillation export.
struct ScoredPair {
    std::string query_id;
    DocId doc_id;
    double score;
};

enum class ExportFormat { Tsv, Jsonl };

/// Scores every run-file (query, doc) pair through the handle's aligned-score
/// primitive, in run-file order. Every doc_id must resolve against the corpus
/// and every query_id against the query file; resolution failures carry the
/// run-file line position.
std::vector<ScoredPair> compute_distillation_scores(const std::vector<QueryRecord>& queries,
                                                    const std::vector<RunEntry>& run,
                                                    const std::vector<Document>& corpus,
                                                    const Reranker& handle);

/// TSV: query_id<TAB>doc_id<TAB>score, scores in shortest round-trip decimal
/// form. JSONL: {"query_id", "doc_id", "score"} per line. Deterministic
/// byte-for-byte for a deterministic backend.
void write_scored_pairs(std::ostream& out, const std::vector<ScoredPair>& pairs,
                        ExportFormat format);

/// Load files, score, write: the CLI export path.
void export_distillation(const std::string& queries_path, const std::string& run_path,
                         const std::string& docs_path, const Reranker& handle,
                         std::ostream& out, ExportFormat format = ExportFormat::Tsv);

}  // namespace rerank
