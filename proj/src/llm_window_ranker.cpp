#include <chrono>
#include <thread>

#include <httplib.h>

#include "rerank/listwise.hpp"

namespace rerank {

namespace {

// Splits "http://host:port/path" into client target and path.
struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    std::size_t path_start = std::string::npos;
    if (scheme_end != std::string::npos) {
        path_start = url.find('/', scheme_end + 3);
    } else {
        path_start = url.find('/');
    }
    if (path_start == std::string::npos) {
        return ParsedUrl{url, "/"};
    }
    return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

LlmWindowRanker::LlmWindowRanker(LlmClientConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty()) {
        throw BackendInitFailure("LLM window ranker needs a non-empty endpoint URL");
    }
    if (config_.attempts < 1) {
        config_.attempts = 1;
    }
}

std::string LlmWindowRanker::order_window(const std::string& query,
                                          const std::vector<WindowDoc>& docs) const {
    const auto [origin, path] = split_url(config_.endpoint_url);
    const std::string body = build_window_request(config_.model, query, docs).dump();

    httplib::Headers headers;
    if (!config_.credential.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.credential);
    }

    std::string last_failure;
    for (int attempt = 0; attempt < config_.attempts; ++attempt) {
        if (attempt > 0) {
            const auto delay =
                std::chrono::milliseconds(config_.backoff_base_ms * (1L << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client client(origin);
        client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
        client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));

        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_failure = httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw WindowTransportError("LLM endpoint returned HTTP " +
                                       std::to_string(res->status));
        }
        try {
            const auto parsed = nlohmann::json::parse(res->body);
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw WindowTransportError(std::string("malformed chat-completion response: ") +
                                       e.what());
        }
    }
    throw WindowTransportError("LLM endpoint unreachable after " +
                               std::to_string(config_.attempts) + " attempts (last: " +
                               last_failure + ")");
}

}  // namespace rerank
