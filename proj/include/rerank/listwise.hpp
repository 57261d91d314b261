#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rerank/core.hpp"
#include "rerank/provider.hpp"

namespace rerank {

/// One document inside a window: its local 0-based index and its text.
struct WindowDoc {
    std::size_t index;
    std::string text;
};

/// Orders one window of documents, returning the bracketed wire form
/// "[2] > [1] > [3]" with 1-based indices. Implementations must be safe for
/// concurrent use across queries.
class WindowRanker {
public:
    virtual ~WindowRanker() = default;
    virtual std::string order_window(const std::string& query,
                                     const std::vector<WindowDoc>& docs) const = 0;
};

/// Orders windows by a supplied relevance function, descending. Transitive
/// by construction; the test oracle for sliding-window properties.
class OracleWindowRanker final : public WindowRanker {
public:
    explicit OracleWindowRanker(std::function<double(const std::string&)> relevance)
        : relevance_(std::move(relevance)) {}

    std::string order_window(const std::string& query,
                             const std::vector<WindowDoc>& docs) const override;

private:
    std::function<double(const std::string&)> relevance_;
};

/// Orders windows by an inference provider's pair logits against the query.
/// Gives listwise ranking a deterministic offline path.
class ProviderWindowRanker final : public WindowRanker {
public:
    explicit ProviderWindowRanker(std::shared_ptr<const InferenceProvider> provider)
        : provider_(std::move(provider)) {}

    std::string order_window(const std::string& query,
                             const std::vector<WindowDoc>& docs) const override;

private:
    std::shared_ptr<const InferenceProvider> provider_;
};

struct SlidingWindowConfig {
    std::size_t window_size = 4;
    std::size_t stride = 2;
    std::size_t passes = 1;
    /// When a window ranker fails in transport after its retries, return the
    /// order computed so far instead of erroring.
    bool allow_partial = false;

    /// stride < window_size is required for the carry-forward property.
    void validate() const;
};

/// A permutation of the window's local indices 0..w-1.
struct Permutation {
    std::vector<std::size_t> order;

    bool operator==(const Permutation&) const = default;
};

/// Extracts bracketed 1-based indices in order of appearance and repairs the
/// sequence: out-of-range indices are dropped, duplicates keep their first
/// occurrence, missing indices are appended in ascending order. Throws
/// UnparseableWindow when no in-range index is found.
Permutation parse_permutation(const std::string& raw, std::size_t window_len);

/// Wire form of a permutation: "[1] > [3] > [2]" with 1-based indices.
std::string serialize_permutation(const Permutation& permutation);

/// For each pass, walks windows back-to-front at the configured stride,
/// reordering each window in place by the ranker's permutation. Windows of
/// size 1 never invoke the ranker.
std::vector<Document> slide_windows(const std::string& query, std::vector<Document> docs,
                                    const WindowRanker& ranker,
                                    const SlidingWindowConfig& config);

/// build_ordered_results over slide_windows output; has_scores = false.
RankedResults rank_listwise(const RankRequest& request, const WindowRanker& ranker,
                            const SlidingWindowConfig& config);

/// Chat-completion client configuration for LLM-backed window ranking.
/// Endpoint and credential default from RERANK_LLM_ENDPOINT / RERANK_API_KEY.
struct LlmClientConfig {
    std::string endpoint_url;
    std::string model;
    std::string credential;
    int timeout_ms = 30000;
    int attempts = 3;  ///< total attempts before WindowTransportError
    int backoff_base_ms = 250;
};

/// Request body for one window: {"model", "messages": [{role, content}...],
/// "temperature": 0}.
nlohmann::ordered_json build_window_request(const std::string& model, const std::string& query,
                                            const std::vector<WindowDoc>& docs);

/// Delegates window ordering to an external chat-completion endpoint, with
/// bounded retries and exponential backoff on transport failures.
class LlmWindowRanker final : public WindowRanker {
public:
    explicit LlmWindowRanker(LlmClientConfig config);

    std::string order_window(const std::string& query,
                             const std::vector<WindowDoc>& docs) const override;

    const LlmClientConfig& config() const { return config_; }

private:
    LlmClientConfig config_;
};

}  // namespace rerank
