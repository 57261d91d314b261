#include "rerank/reference_provider.hpp"

#include <cctype>
#include <cmath>

#include "rerank/pointwise.hpp"

namespace rerank {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform in [-1, 1) from the top 53 bits.
double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current += c;
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    if (tokens.empty()) tokens.emplace_back();  // empty text still embeds to one row
    return tokens;
}

void normalize_row(std::span<double> row) {
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) {
        row[0] = 1.0;
        for (std::size_t i = 1; i < row.size(); ++i) row[i] = 0.0;
        return;
    }
    for (double& v : row) v /= norm;
}

}  // namespace

ReferenceProvider::ReferenceProvider(std::uint64_t seed)
    : ReferenceProvider(seed, Options{}) {}

ReferenceProvider::ReferenceProvider(std::uint64_t seed, Options options)
    : seed_(seed), options_(options) {
    if (options_.dim < 1 || options_.window < 1) {
        throw DimensionMismatch("reference provider needs dim >= 1 and window >= 1");
    }
}

std::vector<double> ReferenceProvider::token_vector(const std::string& token) const {
    std::uint64_t state = seed_ ^ fnv1a(token);
    std::vector<double> v(options_.dim);
    for (double& x : v) {
        x = unit_interval(splitmix64(state));
    }
    normalize_row(std::span<double>(v.data(), v.size()));
    return v;
}

EmbeddingMatrix ReferenceProvider::embed(const std::string& text, TextRole) const {
    const auto tokens = whitespace_tokens(text);
    std::vector<std::vector<double>> token_vecs;
    token_vecs.reserve(tokens.size());
    for (const auto& token : tokens) {
        token_vecs.push_back(token_vector(token));
    }

    const std::size_t n = tokens.size();
    std::vector<double> values(n * options_.dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t end = std::min(i + options_.window, n);
        std::span<double> row(values.data() + i * options_.dim, options_.dim);
        for (std::size_t j = i; j < end; ++j) {
            for (std::size_t k = 0; k < options_.dim; ++k) {
                row[k] += token_vecs[j][k];
            }
        }
        normalize_row(row);
    }
    return EmbeddingMatrix(n, options_.dim, std::move(values), /*normalized=*/true);
}

double ReferenceProvider::pair_logit(const std::string& query, const std::string& doc) const {
    const EmbeddingMatrix query_emb = embed(query, TextRole::Query);
    const EmbeddingMatrix doc_emb = embed(doc, TextRole::Document);
    double logit = 4.0 * maxsim_score(query_emb, doc_emb) /
                   static_cast<double>(query_emb.rows());
    if (options_.quantized) {
        logit = std::nearbyint(logit * 64.0) / 64.0;
    }
    return logit;
}

LogitPair ReferenceProvider::dual_logits(const std::string& query, const std::string& doc) const {
    const double logit = pair_logit(query, doc);
    return LogitPair{logit, -logit};
}

ProviderCaps ReferenceProvider::capabilities() const {
    ProviderCaps caps;
    caps.supports_batch = true;
    caps.concurrent = true;
    caps.quantized = options_.quantized;
    caps.effective_device = "cpu";
    caps.effective_precision = options_.quantized ? "int8" : "fp32";
    return caps;
}

}  // namespace rerank
