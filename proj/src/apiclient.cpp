#include "rerank/apiclient.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace rerank {

namespace {

struct ParsedUrl {
    std::string origin;
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    std::size_t path_start;
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

std::string replace_all(std::string text, const std::string& needle, const std::string& with) {
    if (needle.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), with);
        pos += with.size();
    }
    return text;
}

std::string excerpt(const std::string& body, std::size_t limit = 160) {
    if (body.size() <= limit) return body;
    return body.substr(0, limit) + "...";
}

}  // namespace

struct HostedApiClient::Impl {
    ApiConfig config;
    mutable std::atomic<std::uint64_t> requests{0};
    mutable std::atomic<std::uint64_t> attempts{0};
    mutable std::atomic<std::uint64_t> retries{0};
    mutable std::mutex jitter_mutex;
    mutable std::mt19937 jitter_rng{std::random_device{}()};

    explicit Impl(ApiConfig cfg) : config(std::move(cfg)) {}

    // Credential must never leak through rendered errors.
    std::string redact(const std::string& text) const {
        if (config.credential.empty()) return text;
        return replace_all(text, config.credential, "***");
    }

    std::chrono::milliseconds backoff_delay(int retry_number) const {
        const double base =
            static_cast<double>(config.backoff_base_ms) * std::pow(2.0, retry_number);
        double factor;
        {
            std::lock_guard<std::mutex> lock(jitter_mutex);
            factor = std::uniform_real_distribution<double>(0.5, 1.5)(jitter_rng);
        }
        return std::chrono::milliseconds(static_cast<long>(base * factor) + 1);
    }

    std::vector<ApiResultEntry> call(const std::string& query,
                                     const std::vector<Document>& docs,
                                     std::optional<std::size_t> top_n) const {
        requests.fetch_add(1);

        nlohmann::ordered_json body;
        body["model"] = config.model_name;
        body["query"] = query;
        body["documents"] = nlohmann::ordered_json::array();
        for (const Document& doc : docs) {
            body["documents"].push_back(doc.text);
        }
        if (top_n) {
            body["top_n"] = *top_n;
        }
        const std::string payload = body.dump();
        const auto [origin, path] = split_url(config.endpoint_url);

        httplib::Headers headers;
        headers.emplace("Authorization", "Bearer " + config.credential);

        const int max_attempts = 1 + std::max(config.max_retries, 0);
        for (int attempt = 0; attempt < max_attempts; ++attempt) {
            if (attempt > 0) {
                retries.fetch_add(1);
                std::this_thread::sleep_for(backoff_delay(attempt - 1));
            }
            attempts.fetch_add(1);

            httplib::Client client(origin);
            client.set_connection_timeout(std::chrono::milliseconds(config.timeout_ms));
            client.set_read_timeout(std::chrono::milliseconds(config.timeout_ms));

            auto res = client.Post(path, headers, payload, "application/json");
            if (!res) {
                throw Timeout("no response from " + origin + path + " (" +
                              httplib::to_string(res.error()) + ")");
            }
            if (res->status == 429) {
                if (attempt + 1 < max_attempts) {
                    continue;
                }
                throw RateLimited("still rate-limited after " + std::to_string(max_attempts) +
                                  " attempts");
            }
            if (res->status == 401 || res->status == 403) {
                throw AuthError("endpoint rejected the credential (HTTP " +
                                std::to_string(res->status) + "): " +
                                redact(excerpt(res->body)));
            }
            if (res->status != 200) {
                throw MalformedResponse("unexpected HTTP " + std::to_string(res->status) + ": " +
                                        redact(excerpt(res->body)));
            }
            return parse_response(res->body, docs.size());
        }
        throw RateLimited("retry budget exhausted");  // unreachable
    }

    std::vector<ApiResultEntry> parse_response(const std::string& body,
                                               std::size_t doc_count) const {
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw MalformedResponse("response is not valid JSON: " + redact(e.what()));
        }
        if (!parsed.is_object() || !parsed.contains("results") || !parsed["results"].is_array()) {
            throw MalformedResponse("response lacks a 'results' array: " +
                                    redact(excerpt(body)));
        }
        std::vector<ApiResultEntry> entries;
        std::set<std::size_t> seen;
        for (const auto& item : parsed["results"]) {
            if (!item.is_object() || !item.contains("index") ||
                !item["index"].is_number_integer() || !item.contains("relevance_score") ||
                !item["relevance_score"].is_number()) {
                throw MalformedResponse(
                    "result entries must be {index: int, relevance_score: number}");
            }
            const auto raw_index = item["index"].get<std::int64_t>();
            if (raw_index < 0 || static_cast<std::size_t>(raw_index) >= doc_count) {
                throw MalformedResponse("index " + std::to_string(raw_index) +
                                        " out of range for " + std::to_string(doc_count) +
                                        " documents");
            }
            const auto index = static_cast<std::size_t>(raw_index);
            if (!seen.insert(index).second) {
                throw MalformedResponse("duplicate index " + std::to_string(index) +
                                        " in response");
            }
            const double score = item["relevance_score"].get<double>();
            if (!std::isfinite(score)) {
                throw MalformedResponse("non-finite relevance_score at index " +
                                        std::to_string(index));
            }
            entries.push_back(ApiResultEntry{index, score});
        }
        return entries;
    }
};

HostedApiClient::HostedApiClient(ApiConfig config)
    : impl_(std::make_shared<Impl>(std::move(config))) {
    if (impl_->config.endpoint_url.empty()) {
        throw BackendInitFailure("hosted API client needs a non-empty endpoint URL");
    }
}

RankedResults HostedApiClient::rerank(const std::string& query,
                                      const std::vector<Document>& docs,
                                      std::optional<std::size_t> top_n) const {
    const std::vector<ApiResultEntry> entries = impl_->call(query, docs, top_n);

    std::vector<std::pair<Document, double>> scored;
    scored.reserve(docs.size());
    std::vector<bool> covered(docs.size(), false);
    double min_score = 0.0;
    for (const ApiResultEntry& entry : entries) {
        scored.emplace_back(docs[entry.index], entry.relevance_score);
        covered[entry.index] = true;
        min_score = scored.size() == 1 ? entry.relevance_score
                                       : std::min(min_score, entry.relevance_score);
    }
    if (impl_->config.include_unscored) {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            if (!covered[i]) {
                scored.emplace_back(docs[i], min_score);
            }
        }
    }
    return build_ranked_results(query, std::move(scored));
}

std::vector<double> HostedApiClient::score_documents(const std::string& query,
                                                     const std::vector<Document>& docs) const {
    const std::vector<ApiResultEntry> entries = impl_->call(query, docs, std::nullopt);
    if (entries.size() != docs.size()) {
        throw MalformedResponse("server scored " + std::to_string(entries.size()) + " of " +
                                std::to_string(docs.size()) + " documents");
    }
    std::vector<double> scores(docs.size());
    for (const ApiResultEntry& entry : entries) {
        scores[entry.index] = entry.relevance_score;
    }
    return scores;
}

RetryTelemetry HostedApiClient::telemetry() const {
    RetryTelemetry t;
    t.requests = impl_->requests.load();
    t.attempts = impl_->attempts.load();
    t.retries = impl_->retries.load();
    return t;
}

const ApiConfig& HostedApiClient::config() const { return impl_->config; }

RankedResults api_rerank(const ApiConfig& config, const std::string& query,
                         const std::vector<Document>& docs,
                         std::optional<std::size_t> top_n) {
    return HostedApiClient(config).rerank(query, docs, top_n);
}

}  // namespace rerank
