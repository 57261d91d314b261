#include "rerank/serialization.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <limits>

namespace rerank {

std::string shortest_double(double value) {
    std::array<char, 64> buf;
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), ptr);
}

nlohmann::ordered_json doc_id_to_json(const DocId& id) {
    if (std::holds_alternative<std::int64_t>(id)) {
        return std::get<std::int64_t>(id);
    }
    return std::get<std::string>(id);
}

DocId doc_id_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) {
        return j.get<std::int64_t>();
    }
    if (j.is_string()) {
        return j.get<std::string>();
    }
    throw InvalidRecord("doc_id must be an integer or a string, got " + std::string(j.type_name()));
}

nlohmann::ordered_json metadata_to_json(const Metadata& metadata) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [key, value] : metadata) {
        std::visit([&](const auto& v) { out[key] = v; }, value);
    }
    return out;
}

Metadata metadata_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw InvalidRecord("metadata must be an object, got " + std::string(j.type_name()));
    }
    Metadata out;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            out[key] = value.get<std::string>();
        } else if (value.is_boolean()) {
            out[key] = value.get<bool>();
        } else if (value.is_number_integer()) {
            out[key] = value.get<std::int64_t>();
        } else if (value.is_number_unsigned()) {
            const auto u = value.get<std::uint64_t>();
            if (u <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
                out[key] = static_cast<std::int64_t>(u);
            } else {
                out[key] = static_cast<double>(u);
            }
        } else if (value.is_number_float()) {
            out[key] = value.get<double>();
        } else {
            throw InvalidRecord("metadata value for key '" + key +
                                "' must be a scalar (text, number or boolean)");
        }
    }
    return out;
}

nlohmann::ordered_json to_canonical_json(const RankedResults& results) {
    nlohmann::ordered_json out;
    out["query"] = results.query();
    out["has_scores"] = results.has_scores();
    out["results"] = nlohmann::ordered_json::array();
    for (const Result& r : results) {
        nlohmann::ordered_json entry;
        entry["doc_id"] = doc_id_to_json(r.document.doc_id);
        entry["text"] = r.document.text;
        entry["metadata"] = metadata_to_json(r.document.metadata);
        if (results.has_scores()) {
            entry["score"] = *r.score;
        }
        entry["rank"] = r.rank;
        out["results"].push_back(std::move(entry));
    }
    return out;
}

std::string to_canonical_string(const RankedResults& results) {
    return to_canonical_json(results).dump();
}

RankedResults ranked_results_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("query") || !j.contains("has_scores") ||
        !j.contains("results") || !j["results"].is_array()) {
        throw InvalidRecord("expected {query, has_scores, results} object");
    }
    const bool has_scores = j["has_scores"].get<bool>();
    std::vector<Result> results;
    results.reserve(j["results"].size());
    for (const auto& entry : j["results"]) {
        Result r;
        r.document.doc_id = doc_id_from_json(entry.at("doc_id"));
        r.document.text = entry.at("text").get<std::string>();
        if (entry.contains("metadata")) {
            r.document.metadata = metadata_from_json(entry["metadata"]);
        }
        if (entry.contains("score")) {
            r.score = entry["score"].get<double>();
        }
        r.rank = entry.at("rank").get<std::size_t>();
        results.push_back(std::move(r));
    }
    return RankedResults::from_parts(j["query"].get<std::string>(), std::move(results),
                                     has_scores);
}

}  // namespace rerank
