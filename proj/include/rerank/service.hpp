#pragma once

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rerank/registry.hpp"

namespace rerank {

/// Stateless-per-request REST facade over a fixed set of loaded handles.
/// POST /rerank  {"model_type", "query", "documents": [{doc_id?, text,
///                metadata?}], "top_k"?} -> canonical RankedResults JSON.
/// GET  /health  -> capability records for every kind plus loaded aliases.
/// Errors: 400 malformed body, 404 unknown model_type, 422 normalization
/// errors, 503 backend failure, each as {"error": name, "detail": text}.
class RerankService {
public:
    RerankService(std::vector<std::pair<RankerKind, Reranker>> handles, ProviderSet providers,
                  Manifest manifest = Manifest::builtin());
    ~RerankService();

    RerankService(const RerankService&) = delete;
    RerankService& operator=(const RerankService&) = delete;

    /// Binds and serves on a background thread; port 0 picks a free port.
    /// Returns the bound port.
    int start(const std::string& host, int port);

    /// Blocking variant for the CLI.
    void run(const std::string& host, int port);

    void stop();

    /// Request handling without HTTP, for tests and the blocking path:
    /// returns (status, body).
    std::pair<int, std::string> handle_rerank_body(const std::string& body) const;
    std::string health_body() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rerank
