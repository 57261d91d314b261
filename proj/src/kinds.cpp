#include "rerank/kinds.hpp"

namespace rerank {

const std::string& kind_alias(RankerKind kind) {
    static const std::array<std::string, kRankerKindCount> aliases = {
        "cross-encoder", "t5", "colbert", "rankllm", "api", "flashrank"};
    return aliases[static_cast<std::size_t>(kind)];
}

const std::string& kind_name(RankerKind kind) {
    static const std::array<std::string, kRankerKindCount> names = {
        "CrossEncoder", "Seq2Seq", "LateInteraction", "ListwiseLLM", "HostedAPI",
        "OptimizedCPU"};
    return names[static_cast<std::size_t>(kind)];
}

}  // namespace rerank
