#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rerank/errors.hpp"

namespace rerank {

/// Document identifier: integer or text, unique within one rank request.
/// An integer id and its decimal spelling are distinct ids; canonical_doc_id
/// collapses both to text for line-oriented formats.
using DocId = std::variant<std::int64_t, std::string>;

std::string canonical_doc_id(const DocId& id);

/// Scalar metadata value: text, integer, real or boolean.
using MetaValue = std::variant<std::string, std::int64_t, double, bool>;
using Metadata = std::map<std::string, MetaValue>;

/// The unit being re-ranked. Text and metadata are preserved exactly from
/// input to output; backends never rewrite them.
struct Document {
    DocId doc_id;
    std::string text;
    Metadata metadata;

    bool operator==(const Document&) const = default;
};

/// Strict ordering used for multiset comparisons; not a semantic order.
bool document_less(const Document& a, const Document& b);

struct Result {
    Document document;
    std::optional<double> score;
    std::size_t rank = 0;

    const std::string& text() const { return document.text; }
    const DocId& doc_id() const { return document.doc_id; }

    bool operator==(const Result&) const = default;
};

/// Ordered output shared by every backend. Ranks are always exactly 1..n;
/// when has_scores() is true every result carries a score and scores are
/// non-increasing. Immutable after construction.
class RankedResults {
public:
    RankedResults() = default;

    const std::string& query() const { return query_; }
    bool has_scores() const { return has_scores_; }
    const std::vector<Result>& results() const { return results_; }

    std::size_t size() const { return results_.size(); }
    bool empty() const { return results_.empty(); }
    auto begin() const { return results_.begin(); }
    auto end() const { return results_.end(); }
    const Result& at(std::size_t i) const { return results_.at(i); }

    RankedResults top_k(std::size_t k) const;
    double get_score_by_docid(const DocId& id) const;

    /// Reassembles a RankedResults from already-ranked parts, validating the
    /// rank sequence and score coherence. Throws InvalidRecord on violation.
    static RankedResults from_parts(std::string query, std::vector<Result> results,
                                    bool has_scores);

    bool operator==(const RankedResults&) const = default;

private:
    RankedResults(std::string query, std::vector<Result> results, bool has_scores)
        : query_(std::move(query)), results_(std::move(results)), has_scores_(has_scores) {}

    std::string query_;
    std::vector<Result> results_;
    bool has_scores_ = true;

    friend RankedResults build_ranked_results(std::string,
                                              std::vector<std::pair<Document, double>>);
    friend RankedResults build_ordered_results(std::string, std::vector<Document>);
};

/// Normalized form of a rank call: query, documents, optional truncation.
struct RankRequest {
    std::string query;
    std::vector<Document> documents;
    std::optional<std::size_t> desired_k;
};

/// Turns parallel input sequences into Documents. Absent ids default to the
/// positions 0..n-1; absent metadata defaults to empty maps.
/// Throws DuplicateDocId and LengthMismatch.
std::vector<Document> normalize_inputs(
    const std::vector<std::string>& texts,
    const std::optional<std::vector<DocId>>& doc_ids = std::nullopt,
    const std::optional<std::vector<Metadata>>& metadata = std::nullopt);

/// Sorts by score descending, ties broken by input position, ranks 1..n,
/// has_scores = true.
RankedResults build_ranked_results(std::string query,
                                   std::vector<std::pair<Document, double>> scored);

/// Ranks 1..n follow the given order; no scores; has_scores = false.
/// Throws NotAPermutation on duplicate doc ids.
RankedResults build_ordered_results(std::string query, std::vector<Document> ordered);

/// As above, additionally checking that `ordered` is a permutation of
/// `expected` (same documents, id, text and metadata included).
RankedResults build_ordered_results(std::string query, std::vector<Document> ordered,
                                    const std::vector<Document>& expected);

/// First min(k, n) results, ranks preserved. k past the end clamps.
RankedResults top_k(const RankedResults& results, std::size_t k);

/// Score of the unique result with this doc id. Throws NoScoresAvailable for
/// ordered-only results and UnknownDocId when the id is absent.
double get_score_by_docid(const RankedResults& results, const DocId& id);

}  // namespace rerank
