#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rerank/core.hpp"
#include "rerank/provider.hpp"

namespace rerank {

/// Scoring rule applied per document. OptimizedCPU backends reuse
/// CrossEncoderLogit over a quantized provider; there is no separate math.
enum class PointwiseMethod {
    CrossEncoderLogit,   ///< raw relevance logit, unsquashed
    Seq2SeqTrueProb,     ///< softmax probability of the true token
    MaxSim,              ///< late-interaction sum of per-query-token max dot products
};

enum class Seq2SeqScoreForm { Probability, LogProbability };

struct PointwiseOptions {
    Seq2SeqScoreForm seq2seq_form = Seq2SeqScoreForm::Probability;
};

/// p_true = exp(lt) / (exp(lt) + exp(lf)), computed by subtracting the max
/// logit first so extreme inputs neither overflow nor underflow.
double true_probability(LogitPair logits);
double true_log_probability(LogitPair logits);

/// Raw relevance logit for one pair. Provider exceptions surface as
/// ProviderFailure; non-finite provider output is rejected the same way.
double cross_encoder_score(const InferenceProvider& provider, const std::string& query,
                           const std::string& doc);

double seq2seq_score(const InferenceProvider& provider, const std::string& query,
                     const std::string& doc,
                     Seq2SeqScoreForm form = Seq2SeqScoreForm::Probability);

/// Sum over query rows of the max dot product against any doc row. Query
/// rows are accumulated in input order with pairwise summation, so the
/// result is reproducible and invariant to doc-row permutation.
double maxsim_score(const EmbeddingMatrix& query_emb, const EmbeddingMatrix& doc_emb);

/// Scores aligned with input order, no sorting — the distillation primitive.
/// Uses the provider's batch entry points when it declares batch support;
/// otherwise scores pair by pair, attaching the failing index on error.
std::vector<double> score_pairs(PointwiseMethod method, const InferenceProvider& provider,
                                const std::vector<std::pair<std::string, std::string>>& pairs,
                                const PointwiseOptions& options = {});

/// Scores every document with the method's scorer, then build_ranked_results.
/// Scorer failures carry the failing doc_id when attribution is possible.
RankedResults rank_pointwise(PointwiseMethod method, const InferenceProvider& provider,
                             const RankRequest& request, const PointwiseOptions& options = {});

}  // namespace rerank
