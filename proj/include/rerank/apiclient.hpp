#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rerank/core.hpp"

namespace rerank {

/// Configuration for a hosted rerank endpoint. The credential is redacted
/// from every rendered error; it never appears in logs or messages.
struct ApiConfig {
    std::string endpoint_url;
    std::string credential;
    int timeout_ms = 10000;
    int max_retries = 2;  ///< total attempts are at most 1 + max_retries
    std::string model_name;
    int backoff_base_ms = 100;
    /// Append documents the server did not score (top_n < n) after the
    /// scored ones, tied at the lowest returned score, instead of omitting
    /// them.
    bool include_unscored = false;
};

struct ApiResultEntry {
    std::size_t index;
    double relevance_score;
};

struct RetryTelemetry {
    std::uint64_t requests = 0;  ///< rerank calls issued
    std::uint64_t attempts = 0;  ///< HTTP attempts including retries
    std::uint64_t retries = 0;   ///< attempts beyond the first per call
};

/// Client for the hosted wire contract:
///   POST {endpoint_url}  {"model", "query", "documents": [texts], "top_n"?}
///   -> {"results": [{"index": 0-based, "relevance_score": real}]}
/// Scores pass through unmodified; ordering is recomputed locally by
/// build_ranked_results, and every returned document is rejoined to the
/// request's Document by index — text is never taken from the wire.
/// Immutable and safe for concurrent requests.
class HostedApiClient {
public:
    explicit HostedApiClient(ApiConfig config);

    RankedResults rerank(const std::string& query, const std::vector<Document>& docs,
                         std::optional<std::size_t> top_n = std::nullopt) const;

    /// Scores aligned with the input documents (requires the server to score
    /// all of them, i.e. no top_n).
    std::vector<double> score_documents(const std::string& query,
                                        const std::vector<Document>& docs) const;

    RetryTelemetry telemetry() const;
    const ApiConfig& config() const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// One-shot convenience over a throwaway client.
RankedResults api_rerank(const ApiConfig& config, const std::string& query,
                         const std::vector<Document>& docs,
                         std::optional<std::size_t> top_n = std::nullopt);

}  // namespace rerank
