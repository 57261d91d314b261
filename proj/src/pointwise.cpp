#include "rerank/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace rerank {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double acc = 0.0;
        for (double x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

void require_finite(double value, const char* source) {
    if (!std::isfinite(value)) {
        throw ProviderFailure(std::string("provider returned a non-finite ") + source);
    }
}

// Rethrows anything the provider raised as ProviderFailure with `context`
// appended; rerank errors other than ProviderFailure keep their identity.
template <typename Fn>
auto guard_provider(Fn&& fn, const std::string& context) {
    try {
        return fn();
    } catch (Error& e) {
        e.append_detail(" (" + context + ")");
        throw;
    } catch (const std::exception& e) {
        throw ProviderFailure(std::string(e.what()) + " (" + context + ")");
    }
}

using PairList = std::vector<std::pair<std::string, std::string>>;
using AttributionFn = std::function<std::string(std::size_t)>;

std::vector<double> score_pairs_impl(PointwiseMethod method, const InferenceProvider& provider,
                                     const PairList& pairs, const PointwiseOptions& options,
                                     const AttributionFn& attribute) {
    std::vector<double> scores;
    scores.reserve(pairs.size());
    if (pairs.empty()) return scores;

    const bool batch = provider.capabilities().supports_batch;
    const std::string batch_context = "batch of " + std::to_string(pairs.size()) + " pairs";

    switch (method) {
        case PointwiseMethod::CrossEncoderLogit: {
            if (batch) {
                scores = guard_provider([&] { return provider.pair_logit_batch(pairs); },
                                        batch_context);
            } else {
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    scores.push_back(guard_provider(
                        [&] { return provider.pair_logit(pairs[i].first, pairs[i].second); },
                        attribute(i)));
                }
            }
            for (std::size_t i = 0; i < scores.size(); ++i) {
                if (!std::isfinite(scores[i])) {
                    throw ProviderFailure("provider returned a non-finite logit (" +
                                          attribute(i) + ")");
                }
            }
            break;
        }
        case PointwiseMethod::Seq2SeqTrueProb: {
            std::vector<LogitPair> logits;
            if (batch) {
                logits = guard_provider([&] { return provider.dual_logits_batch(pairs); },
                                        batch_context);
            } else {
                logits.reserve(pairs.size());
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    logits.push_back(guard_provider(
                        [&] { return provider.dual_logits(pairs[i].first, pairs[i].second); },
                        attribute(i)));
                }
            }
            for (std::size_t i = 0; i < logits.size(); ++i) {
                if (!std::isfinite(logits[i].logit_true) || !std::isfinite(logits[i].logit_false)) {
                    throw ProviderFailure("provider returned a non-finite logit pair (" +
                                          attribute(i) + ")");
                }
                scores.push_back(options.seq2seq_form == Seq2SeqScoreForm::Probability
                                     ? true_probability(logits[i])
                                     : true_log_probability(logits[i]));
            }
            break;
        }
        case PointwiseMethod::MaxSim: {
            // Embed each distinct query once; batch document embeddings.
            std::unordered_map<std::string, std::size_t> query_slot;
            std::vector<EmbeddingMatrix> query_embs;
            for (const auto& [query, doc] : pairs) {
                if (query_slot.emplace(query, query_embs.size()).second) {
                    query_embs.push_back(guard_provider(
                        [&] { return provider.embed(query, TextRole::Query); },
                        "query embedding"));
                }
            }
            std::vector<EmbeddingMatrix> doc_embs;
            if (batch) {
                std::vector<std::string> texts;
                texts.reserve(pairs.size());
                for (const auto& p : pairs) texts.push_back(p.second);
                doc_embs = guard_provider(
                    [&] { return provider.embed_batch(texts, TextRole::Document); },
                    batch_context);
            } else {
                doc_embs.reserve(pairs.size());
                for (std::size_t i = 0; i < pairs.size(); ++i) {
                    doc_embs.push_back(guard_provider(
                        [&] { return provider.embed(pairs[i].second, TextRole::Document); },
                        attribute(i)));
                }
            }
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const EmbeddingMatrix& qe = query_embs[query_slot.at(pairs[i].first)];
                scores.push_back(maxsim_score(qe, doc_embs[i]));
            }
            break;
        }
    }
    if (scores.size() != pairs.size()) {
        throw ProviderFailure("batch entry point returned " + std::to_string(scores.size()) +
                              " scores for " + std::to_string(pairs.size()) + " pairs");
    }
    return scores;
}

}  // namespace

double true_probability(LogitPair logits) {
    const double m = std::max(logits.logit_true, logits.logit_false);
    const double et = std::exp(logits.logit_true - m);
    const double ef = std::exp(logits.logit_false - m);
    return et / (et + ef);
}

double true_log_probability(LogitPair logits) {
    const double d = logits.logit_true - logits.logit_false;
    if (d >= 0.0) {
        return -std::log1p(std::exp(-d));
    }
    return d - std::log1p(std::exp(d));
}

double cross_encoder_score(const InferenceProvider& provider, const std::string& query,
                           const std::string& doc) {
    const double logit = guard_provider([&] { return provider.pair_logit(query, doc); },
                                        "pair_logit");
    require_finite(logit, "logit");
    return logit;
}

double seq2seq_score(const InferenceProvider& provider, const std::string& query,
                     const std::string& doc, Seq2SeqScoreForm form) {
    const LogitPair logits = guard_provider([&] { return provider.dual_logits(query, doc); },
                                            "dual_logits");
    require_finite(logits.logit_true, "logit_true");
    require_finite(logits.logit_false, "logit_false");
    return form == Seq2SeqScoreForm::Probability ? true_probability(logits)
                                                 : true_log_probability(logits);
}

double maxsim_score(const EmbeddingMatrix& query_emb, const EmbeddingMatrix& doc_emb) {
    if (query_emb.dim() != doc_emb.dim()) {
        throw DimensionMismatch("query embedding dim " + std::to_string(query_emb.dim()) +
                                " != doc embedding dim " + std::to_string(doc_emb.dim()));
    }
    std::vector<double> best(query_emb.rows());
    for (std::size_t i = 0; i < query_emb.rows(); ++i) {
        const auto q_row = query_emb.row(i);
        double max_sim = dot(q_row, doc_emb.row(0));
        for (std::size_t j = 1; j < doc_emb.rows(); ++j) {
            max_sim = std::max(max_sim, dot(q_row, doc_emb.row(j)));
        }
        best[i] = max_sim;
    }
    return pairwise_sum(best);
}

std::vector<double> score_pairs(PointwiseMethod method, const InferenceProvider& provider,
                                const std::vector<std::pair<std::string, std::string>>& pairs,
                                const PointwiseOptions& options) {
    return score_pairs_impl(method, provider, pairs, options, [](std::size_t i) {
        return "at pair index " + std::to_string(i);
    });
}

RankedResults rank_pointwise(PointwiseMethod method, const InferenceProvider& provider,
                             const RankRequest& request, const PointwiseOptions& options) {
    if (request.documents.empty()) {
        return build_ranked_results(request.query, {});
    }
    PairList pairs;
    pairs.reserve(request.documents.size());
    for (const Document& doc : request.documents) {
        pairs.emplace_back(request.query, doc.text);
    }
    const std::vector<double> scores =
        score_pairs_impl(method, provider, pairs, options, [&](std::size_t i) {
            return "while scoring doc_id '" +
                   canonical_doc_id(request.documents[i].doc_id) + "'";
        });

    std::vector<std::pair<Document, double>> scored;
    scored.reserve(request.documents.size());
    for (std::size_t i = 0; i < request.documents.size(); ++i) {
        scored.emplace_back(request.documents[i], scores[i]);
    }
    return build_ranked_results(request.query, std::move(scored));
}

}  // namespace rerank
