#include "rerank/parity.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rerank {

namespace {

// Counts inversions while merge-sorting values[lo, hi).
std::uint64_t merge_count(std::vector<std::size_t>& values, std::vector<std::size_t>& scratch,
                          std::size_t lo, std::size_t hi) {
    if (hi - lo <= 1) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inversions =
        merge_count(values, scratch, lo, mid) + merge_count(values, scratch, mid, hi);
    std::size_t left = lo, right = mid, out = lo;
    while (left < mid && right < hi) {
        if (values[left] <= values[right]) {
            scratch[out++] = values[left++];
        } else {
            inversions += mid - left;
            scratch[out++] = values[right++];
        }
    }
    while (left < mid) scratch[out++] = values[left++];
    while (right < hi) scratch[out++] = values[right++];
    std::copy(scratch.begin() + lo, scratch.begin() + hi, values.begin() + lo);
    return inversions;
}

QueryParity compare_query(const RankedResults& a, const RankedResults& b,
                          const ParityThresholds& thresholds) {
    QueryParity q;
    q.query = a.query();

    std::map<std::string, std::size_t> position_in_b;
    for (std::size_t i = 0; i < b.size(); ++i) {
        position_in_b.emplace(canonical_doc_id(b.at(i).document.doc_id), i);
    }

    std::vector<std::size_t> positions;
    double max_delta = 0.0;
    bool any_scores = a.has_scores() && b.has_scores();
    for (const Result& result : a) {
        const auto it = position_in_b.find(canonical_doc_id(result.document.doc_id));
        if (it == position_in_b.end()) continue;
        positions.push_back(it->second);
        if (any_scores) {
            const double delta =
                std::abs(*result.score - *b.at(it->second).score);
            max_delta = std::max(max_delta, delta);
        }
    }

    q.shared_docs = positions.size();
    q.tau = kendall_tau_from_positions(std::move(positions));
    q.scores_compared = any_scores && q.shared_docs > 0;
    q.max_score_delta = q.scores_compared ? max_delta : 0.0;
    q.pass = q.tau >= thresholds.min_tau &&
             (!q.scores_compared || q.max_score_delta <= thresholds.max_score_delta);
    return q;
}

}  // namespace

double kendall_tau_from_positions(std::vector<std::size_t> positions) {
    const std::size_t m = positions.size();
    if (m < 2) return 1.0;
    std::vector<std::size_t> scratch(positions.size());
    const std::uint64_t inversions = merge_count(positions, scratch, 0, positions.size());
    // (concordant - discordant) / total, with the numerator kept integral so
    // the result matches pair counting bit for bit
    const std::uint64_t total = static_cast<std::uint64_t>(m) * (m - 1) / 2;
    const std::int64_t numerator =
        static_cast<std::int64_t>(total) - 2 * static_cast<std::int64_t>(inversions);
    return static_cast<double>(numerator) / static_cast<double>(total);
}

ParityReport parity_check(const std::vector<RankedResults>& results_a,
                          const std::vector<RankedResults>& results_b,
                          const ParityThresholds& thresholds) {
    std::map<std::string, const RankedResults*> by_query;
    for (const RankedResults& r : results_b) {
        if (!by_query.emplace(r.query(), &r).second) {
            throw QueryMismatch("query '" + r.query() + "' appears twice in side B");
        }
    }
    if (results_a.size() != results_b.size()) {
        throw QueryMismatch("side A has " + std::to_string(results_a.size()) +
                            " queries, side B has " + std::to_string(results_b.size()));
    }

    ParityReport report;
    std::map<std::string, bool> seen_a;
    for (const RankedResults& a : results_a) {
        if (!seen_a.emplace(a.query(), true).second) {
            throw QueryMismatch("query '" + a.query() + "' appears twice in side A");
        }
        const auto it = by_query.find(a.query());
        if (it == by_query.end()) {
            throw QueryMismatch("query '" + a.query() + "' is missing from side B");
        }
        report.per_query.push_back(compare_query(a, *it->second, thresholds));
    }

    if (!report.per_query.empty()) {
        double tau_sum = 0.0, delta_sum = 0.0;
        for (const QueryParity& q : report.per_query) {
            tau_sum += q.tau;
            delta_sum += q.max_score_delta;
            report.pass = report.pass && q.pass;
        }
        report.mean_tau = tau_sum / static_cast<double>(report.per_query.size());
        report.mean_score_delta = delta_sum / static_cast<double>(report.per_query.size());
    }
    return report;
}

nlohmann::ordered_json parity_report_to_json(const ParityReport& report) {
    nlohmann::ordered_json out;
    out["pass"] = report.pass;
    out["mean_tau"] = report.mean_tau;
    out["mean_score_delta"] = report.mean_score_delta;
    out["queries"] = nlohmann::ordered_json::array();
    for (const QueryParity& q : report.per_query) {
        nlohmann::ordered_json entry;
        entry["query"] = q.query;
        entry["shared_docs"] = q.shared_docs;
        entry["tau"] = q.tau;
        entry["max_score_delta"] = q.max_score_delta;
        entry["scores_compared"] = q.scores_compared;
        entry["pass"] = q.pass;
        out["queries"].push_back(std::move(entry));
    }
    return out;
}

}  // namespace rerank
