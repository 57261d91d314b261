#include "rerank/provider.hpp"

#include <cmath>

namespace rerank {

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<double> values,
                                 bool normalized)
    : rows_(rows), dim_(dim), values_(std::move(values)), normalized_(normalized) {
    if (rows_ < 1 || dim_ < 1) {
        throw DimensionMismatch("embedding matrix must have rows >= 1 and dim >= 1, got " +
                                std::to_string(rows_) + "x" + std::to_string(dim_));
    }
    if (values_.size() != rows_ * dim_) {
        throw DimensionMismatch("embedding matrix buffer holds " +
                                std::to_string(values_.size()) + " values, expected " +
                                std::to_string(rows_ * dim_));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw DimensionMismatch("embedding matrix contains a non-finite value");
        }
    }
    if (normalized_) {
        for (std::size_t i = 0; i < rows_; ++i) {
            double sq = 0.0;
            for (double v : row(i)) sq += v * v;
            const double norm = std::sqrt(sq);
            if (std::abs(norm - 1.0) > 1e-6) {
                throw DimensionMismatch("row " + std::to_string(i) +
                                        " is flagged normalized but has norm " +
                                        std::to_string(norm));
            }
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::with_row_appended(std::span<const double> row) const {
    if (row.size() != dim_) {
        throw DimensionMismatch("appended row has dim " + std::to_string(row.size()) +
                                ", matrix has dim " + std::to_string(dim_));
    }
    std::vector<double> values = values_;
    values.insert(values.end(), row.begin(), row.end());
    return EmbeddingMatrix(rows_ + 1, dim_, std::move(values), normalized_);
}

std::vector<double> InferenceProvider::pair_logit_batch(
    const std::vector<std::pair<std::string, std::string>>& pairs) const {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [query, doc] : pairs) {
        out.push_back(pair_logit(query, doc));
    }
    return out;
}

std::vector<LogitPair> InferenceProvider::dual_logits_batch(
    const std::vector<std::pair<std::string, std::string>>& pairs) const {
    std::vector<LogitPair> out;
    out.reserve(pairs.size());
    for (const auto& [query, doc] : pairs) {
        out.push_back(dual_logits(query, doc));
    }
    return out;
}

std::vector<EmbeddingMatrix> InferenceProvider::embed_batch(
    const std::vector<std::string>& texts, TextRole role) const {
    std::vector<EmbeddingMatrix> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        out.push_back(embed(text, role));
    }
    return out;
}

}  // namespace rerank
