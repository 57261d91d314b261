#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rerank/errors.hpp"

namespace rerank {

enum class TextRole { Query, Document };

/// True/false decision logits from a sequence-to-sequence relevance model.
struct LogitPair {
    double logit_true = 0.0;
    double logit_false = 0.0;
};

/// Row-major matrix of token vectors. When `normalized` is set every row has
/// Euclidean norm 1 within 1e-6; construction validates this.
class EmbeddingMatrix {
public:
    EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> values,
                    bool normalized);

    std::size_t rows() const { return rows_; }
    std::size_t dim() const { return dim_; }
    bool normalized() const { return normalized_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(values_.data() + i * dim_, dim_);
    }
    const std::vector<double>& values() const { return values_; }

    /// Copy with one extra row appended (test and tooling helper).
    EmbeddingMatrix with_row_appended(std::span<const double> row) const;

private:
    std::size_t rows_;
    std::size_t dim_;
    std::vector<double> values_;
    bool normalized_;
};

/// Capability record a provider publishes alongside its entry points.
struct ProviderCaps {
    bool supports_batch = false;
    bool concurrent = false;
    bool quantized = false;
    std::string effective_device = "cpu";
    std::string effective_precision = "fp32";
};

/// Plug-in contract isolating all model execution. Implementations must be
/// pure with respect to inputs: identical inputs yield identical outputs
/// within one provider instance. The batch entry points must equal the
/// element-wise application of the scalar ones; the defaults guarantee this.
class InferenceProvider {
public:
    virtual ~InferenceProvider() = default;

    /// Single relevance logit for a (query, document) pair; higher is more relevant.
    virtual double pair_logit(const std::string& query, const std::string& doc) const = 0;

    /// True/false decision logits for a (query, document) pair.
    virtual LogitPair dual_logits(const std::string& query, const std::string& doc) const = 0;

    /// Token-level embeddings for one text.
    virtual EmbeddingMatrix embed(const std::string& text, TextRole role) const = 0;

    virtual std::vector<double> pair_logit_batch(
        const std::vector<std::pair<std::string, std::string>>& pairs) const;
    virtual std::vector<LogitPair> dual_logits_batch(
        const std::vector<std::pair<std::string, std::string>>& pairs) const;
    virtual std::vector<EmbeddingMatrix> embed_batch(const std::vector<std::string>& texts,
                                                     TextRole role) const;

    virtual ProviderCaps capabilities() const = 0;
};

}  // namespace rerank
