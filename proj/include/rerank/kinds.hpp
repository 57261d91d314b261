#pragma once

#include <array>
#include <string>

namespace rerank {

/// Closed set of reranker families the registry can construct.
enum class RankerKind {
    CrossEncoder,     ///< single-logit pair classifier
    Seq2Seq,          ///< true/false token probability
    LateInteraction,  ///< token-level MaxSim
    ListwiseLLM,      ///< sliding-window permutation ranking, ordered-only output
    HostedAPI,        ///< remote scoring endpoint
    OptimizedCPU,     ///< cross-encoder scoring over a quantized provider
};

inline constexpr std::size_t kRankerKindCount = 6;

constexpr std::array<RankerKind, kRankerKindCount> all_ranker_kinds() {
    return {RankerKind::CrossEncoder,    RankerKind::Seq2Seq,   RankerKind::LateInteraction,
            RankerKind::ListwiseLLM,     RankerKind::HostedAPI, RankerKind::OptimizedCPU};
}

/// The registered alias for a kind ("cross-encoder", "t5", "colbert",
/// "rankllm", "api", "flashrank"). Aliases double as manifest keys.
const std::string& kind_alias(RankerKind kind);

/// Human-readable kind name for error messages ("CrossEncoder", ...).
const std::string& kind_name(RankerKind kind);

}  // namespace rerank
