#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rerank/core.hpp"

namespace rerank {

struct ParityThresholds {
    double min_tau = 0.99;
    double max_score_delta = 1e-4;
};

struct QueryParity {
    std::string query;
    std::size_t shared_docs = 0;
    double tau = 1.0;
    double max_score_delta = 0.0;
    bool scores_compared = false;  ///< both sides carried scores for shared docs
    bool pass = true;
};

struct ParityReport {
    std::vector<QueryParity> per_query;
    double mean_tau = 1.0;
    double mean_score_delta = 0.0;
    bool pass = true;
};

/// Kendall tau-a of a ranking expressed as positions in the other ranking:
/// 1 - 2 * inversions / (m choose 2). Counted by merge sort; fewer than two
/// elements give tau = 1.
double kendall_tau_from_positions(std::vector<std::size_t> positions);

/// Compares two result sets query by query: Kendall tau over shared doc_ids
/// and max |score_a - score_b|. Queries must match one-to-one; throws
/// QueryMismatch otherwise.
ParityReport parity_check(const std::vector<RankedResults>& results_a,
                          const std::vector<RankedResults>& results_b,
                          const ParityThresholds& thresholds = {});

nlohmann::ordered_json parity_report_to_json(const ParityReport& report);

}  // namespace rerank
