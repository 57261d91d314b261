#pragma once

#include <cstdint>

#include "rerank/provider.hpp"

namespace rerank {

/// Deterministic stand-in for a real model: outputs are a fixed function of
/// (seed, input text). Each whitespace token hashes to a seeded pseudo-random
/// unit vector; token vectors are averaged over a small sliding window and
/// renormalized, so identical texts embed identically and score(q, q) is
/// maximal. Useful as an end-to-end test substrate without model weights.
class ReferenceProvider final : public InferenceProvider {
public:
    struct Options {
        bool quantized = false;   ///< round logits to 1/64 steps, report quantized caps
        std::size_t dim = 16;
        std::size_t window = 2;
    };

    explicit ReferenceProvider(std::uint64_t seed = 0);
    ReferenceProvider(std::uint64_t seed, Options options);

    double pair_logit(const std::string& query, const std::string& doc) const override;
    LogitPair dual_logits(const std::string& query, const std::string& doc) const override;
    EmbeddingMatrix embed(const std::string& text, TextRole role) const override;
    ProviderCaps capabilities() const override;

    std::uint64_t seed() const { return seed_; }

private:
    std::vector<double> token_vector(const std::string& token) const;

    std::uint64_t seed_;
    Options options_;
};

}  // namespace rerank
