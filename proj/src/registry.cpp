#include "rerank/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "rerank/pointwise.hpp"
#include "rerank/reference_provider.hpp"

namespace rerank {

namespace detail {

class Backend {
public:
    Backend(ModelSpec spec, HandleInfo info) : spec_(std::move(spec)), info_(std::move(info)) {}
    virtual ~Backend() = default;

    const ModelSpec& spec() const { return spec_; }
    const HandleInfo& info() const { return info_; }

    virtual RankedResults rank(const RankRequest& request) const = 0;
    virtual std::vector<double> score_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) const = 0;

private:
    ModelSpec spec_;
    HandleInfo info_;
};

namespace {

class PointwiseBackend final : public Backend {
public:
    PointwiseBackend(ModelSpec spec, HandleInfo info, PointwiseMethod method,
                     std::shared_ptr<const InferenceProvider> provider, PointwiseOptions options)
        : Backend(std::move(spec), std::move(info)),
          method_(method),
          provider_(std::move(provider)),
          options_(options) {}

    RankedResults rank(const RankRequest& request) const override {
        RankedResults ranked = rank_pointwise(method_, *provider_, request, options_);
        if (request.desired_k) {
            return ranked.top_k(*request.desired_k);
        }
        return ranked;
    }

    std::vector<double> score_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) const override {
        return rerank::score_pairs(method_, *provider_, pairs, options_);
    }

private:
    PointwiseMethod method_;
    std::shared_ptr<const InferenceProvider> provider_;
    PointwiseOptions options_;
};

class ListwiseBackend final : public Backend {
public:
    ListwiseBackend(ModelSpec spec, HandleInfo info,
                    std::shared_ptr<const WindowRanker> ranker, SlidingWindowConfig config)
        : Backend(std::move(spec), std::move(info)),
          ranker_(std::move(ranker)),
          config_(config) {}

    RankedResults rank(const RankRequest& request) const override {
        RankedResults ordered = rank_listwise(request, *ranker_, config_);
        if (request.desired_k) {
            return ordered.top_k(*request.desired_k);
        }
        return ordered;
    }

    std::vector<double> score_pairs(
        const std::vector<std::pair<std::string, std::string>>&) const override {
        throw NoScoresAvailable(
            "listwise rerankers produce an ordering, not per-document scores");
    }

private:
    std::shared_ptr<const WindowRanker> ranker_;
    SlidingWindowConfig config_;
};

class HostedBackend final : public Backend {
public:
    HostedBackend(ModelSpec spec, HandleInfo info, HostedApiClient client)
        : Backend(std::move(spec), std::move(info)), client_(std::move(client)) {}

    RankedResults rank(const RankRequest& request) const override {
        if (request.documents.empty()) {
            return build_ranked_results(request.query, {});
        }
        return client_.rerank(request.query, request.documents, request.desired_k);
    }

    std::vector<double> score_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) const override {
        // One endpoint call per contiguous run of equal queries.
        std::vector<double> out;
        out.reserve(pairs.size());
        std::size_t start = 0;
        while (start < pairs.size()) {
            std::size_t end = start;
            while (end < pairs.size() && pairs[end].first == pairs[start].first) ++end;
            std::vector<Document> docs;
            docs.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                Document doc;
                doc.doc_id = static_cast<std::int64_t>(i - start);
                doc.text = pairs[i].second;
                docs.push_back(std::move(doc));
            }
            const std::vector<double> scores =
                client_.score_documents(pairs[start].first, docs);
            out.insert(out.end(), scores.begin(), scores.end());
            start = end;
        }
        return out;
    }

    const HostedApiClient& client() const { return client_; }

private:
    HostedApiClient client_;
};

std::string option_or(const ModelSpec& spec, const std::string& key, std::string fallback) {
    const auto it = spec.options.find(key);
    return it == spec.options.end() ? std::move(fallback) : it->second;
}

bool option_flag(const ModelSpec& spec, const std::string& key) {
    return option_or(spec, key, "false") == "true";
}

std::size_t option_size(const ModelSpec& spec, const std::string& key, std::size_t fallback) {
    const auto it = spec.options.find(key);
    if (it == spec.options.end()) return fallback;
    try {
        const long long v = std::stoll(it->second);
        if (v < 0) throw std::out_of_range("negative");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw BackendInitFailure("option '" + key + "' must be a non-negative integer, got '" +
                                 it->second + "'");
    }
}

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : std::string();
}

CapabilityMissing capability_error(RankerKind kind, const std::string& requirement,
                                   const std::string& hint) {
    return CapabilityMissing("cannot load model type '" + kind_alias(kind) + "' (" +
                             kind_name(kind) + "): missing " + requirement + ". Hint: " + hint);
}

// Capability probe shared by load_reranker and detect_capabilities. Returns
// the missing requirement + hint when the kind cannot be constructed.
struct CapabilityCheck {
    bool available = true;
    std::string requirement;
    std::string hint;
};

std::string pointwise_slot(const ModelSpec& spec, RankerKind kind) {
    const std::string fallback =
        kind == RankerKind::OptimizedCPU ? "quantized" : "default";
    return option_or(spec, "provider", fallback);
}

CapabilityCheck check_capability(RankerKind kind, const ModelSpec& spec,
                                 const ProviderSet& providers, const Manifest& manifest) {
    const ManifestEntry& entry = manifest.entry(kind);
    CapabilityCheck check;
    switch (kind) {
        case RankerKind::CrossEncoder:
        case RankerKind::Seq2Seq:
        case RankerKind::LateInteraction:
        case RankerKind::OptimizedCPU: {
            const std::string slot = pointwise_slot(spec, kind);
            const auto provider = providers.find_provider(slot);
            if (!provider) {
                check.available = false;
                check.requirement = "an inference provider in slot '" + slot + "' (" +
                                    entry.requires_text + ")";
                check.hint = entry.hint;
            } else if (kind == RankerKind::OptimizedCPU &&
                       !provider->capabilities().quantized) {
                check.available = false;
                check.requirement = "a quantized provider: slot '" + slot +
                                    "' holds one that does not report quantized=true";
                check.hint = entry.hint;
            }
            break;
        }
        case RankerKind::ListwiseLLM: {
            if (!providers.window_ranker() && env_or_empty("RERANK_LLM_ENDPOINT").empty()) {
                check.available = false;
                check.requirement = entry.requires_text;
                check.hint = entry.hint;
            }
            break;
        }
        case RankerKind::HostedAPI: {
            ApiConfig config = providers.api_config().value_or(ApiConfig{});
            if (config.credential.empty()) {
                config.credential = env_or_empty("RERANK_API_KEY");
            }
            if (config.endpoint_url.empty()) {
                config.endpoint_url =
                    option_or(spec, "endpoint", env_or_empty("RERANK_API_ENDPOINT"));
            }
            if (config.credential.empty()) {
                check.available = false;
                check.requirement = entry.requires_text +
                                    " (the RERANK_API_KEY environment variable is not set)";
                check.hint = entry.hint;
            } else if (config.endpoint_url.empty()) {
                check.available = false;
                check.requirement = "an endpoint URL for the hosted reranker";
                check.hint = "set RERANK_API_ENDPOINT, pass option 'endpoint', or provide "
                             "ApiConfig via ProviderSet::set_api_config";
            }
            break;
        }
    }
    return check;
}

}  // namespace

}  // namespace detail

ProviderSet& ProviderSet::add_provider(const std::string& slot,
                                       std::shared_ptr<const InferenceProvider> provider) {
    providers_[slot] = std::move(provider);
    return *this;
}

ProviderSet& ProviderSet::set_window_ranker(std::shared_ptr<const WindowRanker> ranker) {
    window_ranker_ = std::move(ranker);
    return *this;
}

ProviderSet& ProviderSet::set_api_config(ApiConfig config) {
    api_config_ = std::move(config);
    return *this;
}

std::shared_ptr<const InferenceProvider> ProviderSet::find_provider(
    const std::string& slot) const {
    const auto it = providers_.find(slot);
    return it == providers_.end() ? nullptr : it->second;
}

ProviderSet reference_provider_set(std::uint64_t seed) {
    auto standard = std::make_shared<ReferenceProvider>(seed);
    ReferenceProvider::Options quantized_options;
    quantized_options.quantized = true;
    auto quantized = std::make_shared<ReferenceProvider>(seed, quantized_options);

    ProviderSet providers;
    providers.add_provider("default", standard);
    providers.add_provider("quantized", quantized);
    providers.set_window_ranker(std::make_shared<ProviderWindowRanker>(standard));
    return providers;
}

RankerKind Reranker::kind() const { return backend_->info().kind; }
const ModelSpec& Reranker::spec() const { return backend_->spec(); }
const HandleInfo& Reranker::info() const { return backend_->info(); }

RankedResults Reranker::rank(const std::string& query, const std::vector<std::string>& docs,
                             const std::optional<std::vector<DocId>>& doc_ids,
                             const std::optional<std::vector<Metadata>>& metadata) const {
    try {
        RankRequest request;
        request.query = query;
        request.documents = normalize_inputs(docs, doc_ids, metadata);
        return backend_->rank(request);
    } catch (Error& e) {
        e.set_backend_tag(kind_alias(kind()));
        throw;
    }
}

RankedResults Reranker::rank(const RankRequest& request) const {
    try {
        return backend_->rank(request);
    } catch (Error& e) {
        e.set_backend_tag(kind_alias(kind()));
        throw;
    }
}

std::vector<double> Reranker::score_pairs(
    const std::vector<std::pair<std::string, std::string>>& pairs) const {
    try {
        return backend_->score_pairs(pairs);
    } catch (Error& e) {
        e.set_backend_tag(kind_alias(kind()));
        throw;
    }
}

std::vector<double> Reranker::score_documents(const std::string& query,
                                              const std::vector<std::string>& docs) const {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(docs.size());
    for (const std::string& doc : docs) {
        pairs.emplace_back(query, doc);
    }
    return score_pairs(pairs);
}

RankerKind parse_kind(const std::string& label) {
    std::string lowered = label;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (RankerKind kind : all_ranker_kinds()) {
        if (lowered == kind_alias(kind)) {
            return kind;
        }
    }
    std::string known;
    for (RankerKind kind : all_ranker_kinds()) {
        if (!known.empty()) known += ", ";
        known += "'" + kind_alias(kind) + "'";
    }
    throw UnknownModelType("'" + label + "' is not a registered model type; known aliases: " +
                           known);
}

std::string default_model_for(RankerKind kind, const Manifest& manifest) {
    return manifest.entry(kind).default_model;
}

std::vector<Capability> detect_capabilities(const ProviderSet& providers,
                                            const Manifest& manifest) {
    std::vector<Capability> out;
    out.reserve(kRankerKindCount);
    for (RankerKind kind : all_ranker_kinds()) {
        ModelSpec spec;
        spec.kind = kind;
        spec.model_ref = default_model_for(kind, manifest);
        const auto check = detail::check_capability(kind, spec, providers, manifest);
        Capability capability;
        capability.kind = kind;
        capability.available = check.available;
        if (!check.available) {
            capability.missing_requirement = check.requirement + ". Hint: " + check.hint;
        }
        out.push_back(std::move(capability));
    }
    return out;
}

Reranker load_reranker(const ModelSpec& spec, const ProviderSet& providers,
                       const Manifest& manifest) {
    if (spec.model_ref.empty()) {
        throw BackendInitFailure("model_ref must be non-empty (use default_model_for)");
    }
    const RankerKind kind = spec.kind;
    const auto check = detail::check_capability(kind, spec, providers, manifest);
    if (!check.available) {
        throw detail::capability_error(kind, check.requirement, check.hint);
    }

    HandleInfo info;
    info.kind = kind;
    info.model_ref = spec.model_ref;

    switch (kind) {
        case RankerKind::CrossEncoder:
        case RankerKind::Seq2Seq:
        case RankerKind::LateInteraction:
        case RankerKind::OptimizedCPU: {
            const std::string slot = detail::pointwise_slot(spec, kind);
            auto provider = providers.find_provider(slot);
            const ProviderCaps caps = provider->capabilities();
            info.provider_slot = slot;
            info.effective_device = caps.effective_device;
            info.effective_precision = caps.effective_precision;
            info.quantized = caps.quantized;
            info.supports_batch = caps.supports_batch;
            info.concurrent = caps.concurrent;

            PointwiseMethod method = PointwiseMethod::CrossEncoderLogit;
            if (kind == RankerKind::Seq2Seq) method = PointwiseMethod::Seq2SeqTrueProb;
            if (kind == RankerKind::LateInteraction) method = PointwiseMethod::MaxSim;

            PointwiseOptions options;
            const std::string form = detail::option_or(spec, "seq2seq_score", "prob");
            if (form == "logprob") {
                options.seq2seq_form = Seq2SeqScoreForm::LogProbability;
            } else if (form != "prob") {
                throw BackendInitFailure("option 'seq2seq_score' must be 'prob' or 'logprob'");
            }
            return Reranker(std::make_shared<detail::PointwiseBackend>(
                spec, std::move(info), method, std::move(provider), options));
        }
        case RankerKind::ListwiseLLM: {
            std::shared_ptr<const WindowRanker> ranker = providers.window_ranker();
            if (!ranker) {
                LlmClientConfig config;
                config.endpoint_url = detail::env_or_empty("RERANK_LLM_ENDPOINT");
                config.credential = detail::env_or_empty("RERANK_API_KEY");
                config.model = spec.model_ref;
                try {
                    ranker = std::make_shared<LlmWindowRanker>(config);
                } catch (Error& e) {
                    throw BackendInitFailure("LLM window ranker construction failed: " +
                                             e.detail());
                }
            }
            SlidingWindowConfig config;
            config.window_size = detail::option_size(spec, "window_size", config.window_size);
            config.stride = detail::option_size(spec, "stride", config.stride);
            config.passes = detail::option_size(spec, "passes", config.passes);
            config.allow_partial = detail::option_flag(spec, "partial_results");
            config.validate();

            info.provider_slot = "";
            info.effective_device = "external";
            info.effective_precision = "n/a";
            return Reranker(std::make_shared<detail::ListwiseBackend>(
                spec, std::move(info), std::move(ranker), config));
        }
        case RankerKind::HostedAPI: {
            ApiConfig config = providers.api_config().value_or(ApiConfig{});
            if (config.credential.empty()) {
                config.credential = detail::env_or_empty("RERANK_API_KEY");
            }
            if (config.endpoint_url.empty()) {
                config.endpoint_url = detail::option_or(
                    spec, "endpoint", detail::env_or_empty("RERANK_API_ENDPOINT"));
            }
            if (config.model_name.empty()) {
                config.model_name = spec.model_ref;
            }
            config.include_unscored =
                config.include_unscored || detail::option_flag(spec, "include_unscored");

            info.provider_slot = "";
            info.effective_device = "remote";
            info.effective_precision = "n/a";
            try {
                HostedApiClient client(std::move(config));
                return Reranker(std::make_shared<detail::HostedBackend>(spec, std::move(info),
                                                                        std::move(client)));
            } catch (const CapabilityMissing&) {
                throw;
            } catch (Error& e) {
                throw BackendInitFailure("hosted API client construction failed: " + e.detail());
            }
        }
    }
    throw BackendInitFailure("unhandled ranker kind");
}

}  // namespace rerank
