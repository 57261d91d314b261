#include "rerank/core.hpp"

#include <algorithm>
#include <set>
#include <tuple>

namespace rerank {

std::string canonical_doc_id(const DocId& id) {
    if (std::holds_alternative<std::int64_t>(id)) {
        return std::to_string(std::get<std::int64_t>(id));
    }
    return std::get<std::string>(id);
}

bool document_less(const Document& a, const Document& b) {
    return std::tie(a.doc_id, a.text, a.metadata) < std::tie(b.doc_id, b.text, b.metadata);
}

std::vector<Document> normalize_inputs(const std::vector<std::string>& texts,
                                       const std::optional<std::vector<DocId>>& doc_ids,
                                       const std::optional<std::vector<Metadata>>& metadata) {
    if (doc_ids && doc_ids->size() != texts.size()) {
        throw LengthMismatch("got " + std::to_string(texts.size()) + " texts but " +
                             std::to_string(doc_ids->size()) + " doc_ids");
    }
    if (metadata && metadata->size() != texts.size()) {
        throw LengthMismatch("got " + std::to_string(texts.size()) + " texts but " +
                             std::to_string(metadata->size()) + " metadata entries");
    }
    if (doc_ids) {
        std::set<DocId> seen;
        for (const DocId& id : *doc_ids) {
            if (!seen.insert(id).second) {
                throw DuplicateDocId("doc_id '" + canonical_doc_id(id) +
                                     "' appears more than once");
            }
        }
    }

    std::vector<Document> docs;
    docs.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
        Document doc;
        doc.doc_id = doc_ids ? (*doc_ids)[i] : DocId(static_cast<std::int64_t>(i));
        doc.text = texts[i];
        if (metadata) {
            doc.metadata = (*metadata)[i];
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

RankedResults build_ranked_results(std::string query,
                                   std::vector<std::pair<Document, double>> scored) {
    std::vector<std::size_t> order(scored.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scored[a].second > scored[b].second;
    });

    std::vector<Result> results;
    results.reserve(scored.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        Result r;
        r.document = std::move(scored[order[pos]].first);
        r.score = scored[order[pos]].second;
        r.rank = pos + 1;
        results.push_back(std::move(r));
    }
    return RankedResults(std::move(query), std::move(results), /*has_scores=*/true);
}

RankedResults build_ordered_results(std::string query, std::vector<Document> ordered) {
    std::set<DocId> seen;
    for (const Document& doc : ordered) {
        if (!seen.insert(doc.doc_id).second) {
            throw NotAPermutation("doc_id '" + canonical_doc_id(doc.doc_id) +
                                  "' appears more than once in the ordering");
        }
    }
    std::vector<Result> results;
    results.reserve(ordered.size());
    for (std::size_t pos = 0; pos < ordered.size(); ++pos) {
        Result r;
        r.document = std::move(ordered[pos]);
        r.rank = pos + 1;
        results.push_back(std::move(r));
    }
    return RankedResults(std::move(query), std::move(results), /*has_scores=*/false);
}

RankedResults build_ordered_results(std::string query, std::vector<Document> ordered,
                                    const std::vector<Document>& expected) {
    if (ordered.size() != expected.size()) {
        throw NotAPermutation("ordering has " + std::to_string(ordered.size()) +
                              " documents, expected " + std::to_string(expected.size()));
    }
    std::vector<const Document*> got, want;
    got.reserve(ordered.size());
    want.reserve(expected.size());
    for (const Document& d : ordered) got.push_back(&d);
    for (const Document& d : expected) want.push_back(&d);
    auto by_content = [](const Document* a, const Document* b) {
        return document_less(*a, *b);
    };
    std::sort(got.begin(), got.end(), by_content);
    std::sort(want.begin(), want.end(), by_content);
    for (std::size_t i = 0; i < got.size(); ++i) {
        if (!(*got[i] == *want[i])) {
            throw NotAPermutation("ordering is not a permutation of the request's documents"
                                  " (mismatch at doc_id '" +
                                  canonical_doc_id(want[i]->doc_id) + "')");
        }
    }
    return build_ordered_results(std::move(query), std::move(ordered));
}

RankedResults RankedResults::top_k(std::size_t k) const {
    const std::size_t n = std::min(k, results_.size());
    std::vector<Result> prefix(results_.begin(), results_.begin() + n);
    return RankedResults(query_, std::move(prefix), has_scores_);
}

double RankedResults::get_score_by_docid(const DocId& id) const {
    if (!has_scores_) {
        throw NoScoresAvailable("results for query '" + query_ +
                                "' are ordered-only (has_scores = false)");
    }
    for (const Result& r : results_) {
        if (r.document.doc_id == id) {
            return *r.score;
        }
    }
    throw UnknownDocId("no document with doc_id '" + canonical_doc_id(id) + "'");
}

RankedResults RankedResults::from_parts(std::string query, std::vector<Result> results,
                                        bool has_scores) {
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].rank != i + 1) {
            throw InvalidRecord("rank at position " + std::to_string(i) + " is " +
                                std::to_string(results[i].rank) + ", expected " +
                                std::to_string(i + 1));
        }
        if (has_scores != results[i].score.has_value()) {
            throw InvalidRecord(has_scores ? "missing score on a scored result"
                                           : "unexpected score on an ordered-only result");
        }
        if (has_scores && i > 0 && *results[i - 1].score < *results[i].score) {
            throw InvalidRecord("scores increase at rank " + std::to_string(i + 1));
        }
    }
    return RankedResults(std::move(query), std::move(results), has_scores);
}

RankedResults top_k(const RankedResults& results, std::size_t k) {
    return results.top_k(k);
}

double get_score_by_docid(const RankedResults& results, const DocId& id) {
    return results.get_score_by_docid(id);
}

}  // namespace rerank
