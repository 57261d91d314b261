#include "rerank/service.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rerank/files.hpp"
#include "rerank/serialization.hpp"

namespace rerank {

namespace {

std::string error_body(const std::string& name, const std::string& detail) {
    nlohmann::ordered_json out;
    out["error"] = name;
    out["detail"] = detail;
    return out.dump();
}

}  // namespace

struct RerankService::Impl {
    std::map<RankerKind, Reranker> handles;
    ProviderSet providers;
    Manifest manifest;
    httplib::Server server;
    std::thread server_thread;

    Impl(std::vector<std::pair<RankerKind, Reranker>> handle_list, ProviderSet provider_set,
         Manifest manifest_in)
        : providers(std::move(provider_set)), manifest(std::move(manifest_in)) {
        for (auto& [kind, handle] : handle_list) {
            handles.emplace(kind, std::move(handle));
        }
    }

    std::string loaded_aliases() const {
        std::string out;
        for (const auto& [kind, handle] : handles) {
            if (!out.empty()) out += ", ";
            out += "'" + kind_alias(kind) + "'";
        }
        return out.empty() ? "(none)" : out;
    }

    std::pair<int, std::string> rerank(const std::string& body) const {
        nlohmann::json request;
        try {
            request = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            return {400, error_body("MalformedBody", std::string("invalid JSON: ") + e.what())};
        }
        if (!request.is_object() || !request.contains("model_type") ||
            !request["model_type"].is_string() || !request.contains("query") ||
            !request["query"].is_string() || !request.contains("documents") ||
            !request["documents"].is_array()) {
            return {400, error_body("MalformedBody",
                                    "expected {model_type: str, query: str, documents: [...], "
                                    "top_k?: int}")};
        }

        RankerKind kind;
        try {
            kind = parse_kind(request["model_type"].get<std::string>());
        } catch (const Error& e) {
            return {404, error_body(e.name(), e.detail() + "; loaded: " + loaded_aliases())};
        }
        const auto handle_it = handles.find(kind);
        if (handle_it == handles.end()) {
            return {404, error_body("ModelNotLoaded",
                                    "model type '" + kind_alias(kind) +
                                        "' is not loaded; loaded: " + loaded_aliases())};
        }

        RankRequest rank_request;
        rank_request.query = request["query"].get<std::string>();
        try {
            // Ids must be given for all documents or for none.
            std::vector<std::string> texts;
            std::vector<DocId> ids;
            std::vector<Metadata> metadata;
            bool any_id = false, all_ids = true, any_metadata = false;
            for (const auto& record : request["documents"]) {
                Document doc = document_from_json_service(record);
                texts.push_back(doc.text);
                if (record.contains("doc_id")) {
                    any_id = true;
                    ids.push_back(doc.doc_id);
                } else {
                    all_ids = false;
                }
                if (!doc.metadata.empty()) any_metadata = true;
                metadata.push_back(std::move(doc.metadata));
            }
            if (any_id && !all_ids) {
                return {400, error_body("MalformedBody",
                                        "either every document carries a doc_id or none does")};
            }
            rank_request.documents = normalize_inputs(
                texts, any_id ? std::optional(ids) : std::nullopt,
                any_metadata ? std::optional(metadata) : std::nullopt);
        } catch (const Error& e) {
            const int status = e.name() == "MalformedBody" || e.name() == "InvalidRecord" ? 400 : 422;
            return {status, error_body(e.name(), e.detail())};
        }
        if (request.contains("top_k")) {
            if (!request["top_k"].is_number_integer() || request["top_k"].get<std::int64_t>() < 1) {
                return {400, error_body("MalformedBody", "top_k must be a positive integer")};
            }
            rank_request.desired_k = request["top_k"].get<std::size_t>();
        }

        try {
            const RankedResults results = handle_it->second.rank(rank_request);
            return {200, to_canonical_string(results)};
        } catch (const Error& e) {
            if (e.name() == "DuplicateDocId" || e.name() == "LengthMismatch" ||
                e.name() == "NotAPermutation") {
                return {422, error_body(e.name(), e.detail())};
            }
            return {503, error_body(e.name(), e.detail())};
        } catch (const std::exception& e) {
            return {503, error_body("BackendFailure", e.what())};
        }
    }

    // Service payloads may omit doc_id (positional default via normalize).
    static Document document_from_json_service(const nlohmann::json& record) {
        try {
            return document_from_json(record, /*require_doc_id=*/false);
        } catch (Error& e) {
            throw MalformedBody(e.detail());
        }
    }

    std::string health() const {
        nlohmann::ordered_json out;
        out["status"] = "ok";
        out["loaded"] = nlohmann::ordered_json::array();
        for (const auto& [kind, handle] : handles) {
            out["loaded"].push_back(kind_alias(kind));
        }
        out["capabilities"] = nlohmann::ordered_json::array();
        for (const Capability& capability : detect_capabilities(providers, manifest)) {
            nlohmann::ordered_json entry;
            entry["kind"] = kind_alias(capability.kind);
            entry["available"] = capability.available;
            if (!capability.available) {
                entry["missing_requirement"] = capability.missing_requirement;
            }
            out["capabilities"].push_back(std::move(entry));
        }
        return out.dump();
    }

    void install_routes() {
        server.Post("/rerank", [this](const httplib::Request& req, httplib::Response& res) {
            const auto [status, body] = rerank(req.body);
            res.status = status;
            res.set_content(body, "application/json");
        });
        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(health(), "application/json");
        });
    }
};

RerankService::RerankService(std::vector<std::pair<RankerKind, Reranker>> handles,
                             ProviderSet providers, Manifest manifest)
    : impl_(std::make_unique<Impl>(std::move(handles), std::move(providers),
                                   std::move(manifest))) {
    impl_->install_routes();
}

RerankService::~RerankService() { stop(); }

int RerankService::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) {
            throw BackendInitFailure("cannot bind service to " + host);
        }
        impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    } else {
        if (!impl_->server.bind_to_port(host, port)) {
            throw BackendInitFailure("cannot bind service to " + host + ":" +
                                     std::to_string(port));
        }
        impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    }
    impl_->server.wait_until_ready();
    return bound;
}

void RerankService::run(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) {
        throw BackendInitFailure("cannot serve on " + host + ":" + std::to_string(port));
    }
}

void RerankService::stop() {
    impl_->server.stop();
    if (impl_->server_thread.joinable()) {
        impl_->server_thread.join();
    }
}

std::pair<int, std::string> RerankService::handle_rerank_body(const std::string& body) const {
    return impl_->rerank(body);
}

std::string RerankService::health_body() const { return impl_->health(); }

}  // namespace rerank
