#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rerank/apiclient.hpp"
#include "rerank/core.hpp"
#include "rerank/kinds.hpp"
#include "rerank/listwise.hpp"
#include "rerank/manifest.hpp"
#include "rerank/provider.hpp"

namespace rerank {

enum class DeviceHint { Cpu, Gpu, Auto };
enum class PrecisionHint { Fp32, Fp16, Default };

/// Declarative description of which reranker family to instantiate and with
/// what hints. Hints are advisory: backends may ignore them but record the
/// effective setting in the handle's introspection data.
struct ModelSpec {
    std::string model_ref;
    RankerKind kind = RankerKind::CrossEncoder;
    DeviceHint device = DeviceHint::Auto;
    PrecisionHint precision = PrecisionHint::Default;
    /// Backend-specific options. Recognized keys: "provider" (slot name),
    /// "seq2seq_score" ("prob" | "logprob"), "window_size", "stride",
    /// "passes", "partial_results" ("true"/"false"), "endpoint",
    /// "include_unscored" ("true"/"false").
    std::map<std::string, std::string> options;
};

struct Capability {
    RankerKind kind;
    bool available = false;
    std::string missing_requirement;  ///< human-readable; present when unavailable
};

/// Explicit set of provider bindings passed at load time; nothing is
/// discovered from the ambient environment except the documented variables.
/// Conventional inference slots: "default" (standard) and "quantized"
/// (required by the flashrank kind).
class ProviderSet {
public:
    ProviderSet& add_provider(const std::string& slot,
                              std::shared_ptr<const InferenceProvider> provider);
    ProviderSet& set_window_ranker(std::shared_ptr<const WindowRanker> ranker);
    ProviderSet& set_api_config(ApiConfig config);

    std::shared_ptr<const InferenceProvider> find_provider(const std::string& slot) const;
    std::shared_ptr<const WindowRanker> window_ranker() const { return window_ranker_; }
    const std::optional<ApiConfig>& api_config() const { return api_config_; }

private:
    std::map<std::string, std::shared_ptr<const InferenceProvider>> providers_;
    std::shared_ptr<const WindowRanker> window_ranker_;
    std::optional<ApiConfig> api_config_;
};

/// Reference providers in the "default" and "quantized" slots plus a
/// provider-backed window ranker, all deterministic from one seed. The CLI,
/// the service and the tests share this wiring.
ProviderSet reference_provider_set(std::uint64_t seed = 0);

/// Effective settings and capability record for a loaded handle.
struct HandleInfo {
    RankerKind kind;
    std::string model_ref;
    std::string provider_slot;  ///< empty for remote backends
    std::string effective_device;
    std::string effective_precision;
    bool quantized = false;
    bool supports_batch = false;
    bool concurrent = false;
};

namespace detail {
class Backend;
}

/// Immutable handle over one backend, safe to share across threads. Exposes
/// the single ranking entry point plus the aligned-score primitive used for
/// distillation export.
class Reranker {
public:
    RankerKind kind() const;
    const ModelSpec& spec() const;
    const HandleInfo& info() const;

    RankedResults rank(const std::string& query, const std::vector<std::string>& docs,
                       const std::optional<std::vector<DocId>>& doc_ids = std::nullopt,
                       const std::optional<std::vector<Metadata>>& metadata = std::nullopt) const;
    RankedResults rank(const RankRequest& request) const;

    /// Scores aligned with input order, no sorting. Ordered-only backends
    /// throw NoScoresAvailable.
    std::vector<double> score_pairs(
        const std::vector<std::pair<std::string, std::string>>& pairs) const;
    std::vector<double> score_documents(const std::string& query,
                                        const std::vector<std::string>& docs) const;

private:
    friend Reranker load_reranker(const ModelSpec&, const ProviderSet&, const Manifest&);
    explicit Reranker(std::shared_ptr<const detail::Backend> backend)
        : backend_(std::move(backend)) {}

    std::shared_ptr<const detail::Backend> backend_;
};

/// Maps a model-type label to its kind, case-insensitively. Throws
/// UnknownModelType listing the known aliases.
RankerKind parse_kind(const std::string& label);

/// Default model_ref per kind from the manifest; never empty.
std::string default_model_for(RankerKind kind, const Manifest& manifest = Manifest::builtin());

/// Availability of every kind against the given provider set, with a
/// human-readable missing requirement for unavailable ones.
std::vector<Capability> detect_capabilities(const ProviderSet& providers,
                                            const Manifest& manifest = Manifest::builtin());

/// Constructs the backend for the spec, resolving provider bindings eagerly
/// so failures occur at load time, not rank time. Throws CapabilityMissing
/// (with the requested kind, the missing requirement and a remediation hint)
/// or BackendInitFailure.
Reranker load_reranker(const ModelSpec& spec, const ProviderSet& providers,
                       const Manifest& manifest = Manifest::builtin());

}  // namespace rerank
