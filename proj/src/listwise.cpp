#include "rerank/listwise.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace rerank {

namespace {

std::string join_window_order(const std::vector<std::size_t>& zero_based) {
    std::string out;
    for (std::size_t i = 0; i < zero_based.size(); ++i) {
        if (i > 0) out += " > ";
        out += "[" + std::to_string(zero_based[i] + 1) + "]";
    }
    return out;
}

}  // namespace

std::string OracleWindowRanker::order_window(const std::string&,
                                             const std::vector<WindowDoc>& docs) const {
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return relevance_(docs[a].text) > relevance_(docs[b].text);
    });
    return join_window_order(order);
}

std::string ProviderWindowRanker::order_window(const std::string& query,
                                               const std::vector<WindowDoc>& docs) const {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(docs.size());
    for (const WindowDoc& doc : docs) {
        pairs.emplace_back(query, doc.text);
    }
    const std::vector<double> logits = provider_->pair_logit_batch(pairs);
    std::vector<std::size_t> order(docs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return logits[a] > logits[b]; });
    return join_window_order(order);
}

void SlidingWindowConfig::validate() const {
    if (window_size < 1 || stride < 1 || passes < 1) {
        throw BackendInitFailure("sliding-window config needs window_size, stride and passes >= 1");
    }
    if (stride >= window_size) {
        throw BackendInitFailure("sliding-window stride (" + std::to_string(stride) +
                                 ") must be smaller than window_size (" +
                                 std::to_string(window_size) + ")");
    }
}

Permutation parse_permutation(const std::string& raw, std::size_t window_len) {
    std::vector<std::size_t> order;
    std::set<std::size_t> seen;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '[') {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        std::size_t value = 0;
        bool any_digit = false;
        while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) {
            value = value * 10 + static_cast<std::size_t>(raw[j] - '0');
            any_digit = true;
            ++j;
        }
        if (any_digit && j < raw.size() && raw[j] == ']') {
            if (value >= 1 && value <= window_len) {  // drop out-of-range
                if (seen.insert(value - 1).second) {  // keep first occurrence
                    order.push_back(value - 1);
                }
            }
            i = j + 1;
        } else {
            ++i;
        }
    }
    if (order.empty()) {
        const std::string excerpt = raw.substr(0, 80);
        throw UnparseableWindow("no valid indices in window output \"" + excerpt + "\"");
    }
    for (std::size_t idx = 0; idx < window_len; ++idx) {  // append missing, ascending
        if (!seen.contains(idx)) {
            order.push_back(idx);
        }
    }
    return Permutation{std::move(order)};
}

std::string serialize_permutation(const Permutation& permutation) {
    return join_window_order(permutation.order);
}

std::vector<Document> slide_windows(const std::string& query, std::vector<Document> docs,
                                    const WindowRanker& ranker,
                                    const SlidingWindowConfig& config) {
    config.validate();
    const std::size_t n = docs.size();
    if (n <= 1) {
        return docs;  // nothing to reorder; ranker never invoked
    }

    for (std::size_t pass = 0; pass < config.passes; ++pass) {
        std::size_t start = n > config.window_size ? n - config.window_size : 0;
        while (true) {
            const std::size_t end = std::min(start + config.window_size, n);
            const std::size_t len = end - start;
            if (len >= 2) {
                std::vector<WindowDoc> window;
                window.reserve(len);
                for (std::size_t i = 0; i < len; ++i) {
                    window.push_back(WindowDoc{i, docs[start + i].text});
                }
                std::string raw;
                try {
                    raw = ranker.order_window(query, window);
                } catch (WindowTransportError&) {
                    if (config.allow_partial) {
                        return docs;  // order computed so far
                    }
                    throw;
                }
                Permutation perm;
                try {
                    perm = parse_permutation(raw, len);
                } catch (Error& e) {
                    e.append_detail(" (window at offset " + std::to_string(start) + ")");
                    throw;
                }
                std::vector<Document> reordered;
                reordered.reserve(len);
                for (std::size_t local : perm.order) {
                    reordered.push_back(std::move(docs[start + local]));
                }
                std::move(reordered.begin(), reordered.end(), docs.begin() + start);
            }
            if (start == 0) break;
            start = start > config.stride ? start - config.stride : 0;
        }
    }
    return docs;
}

RankedResults rank_listwise(const RankRequest& request, const WindowRanker& ranker,
                            const SlidingWindowConfig& config) {
    std::vector<Document> ordered = slide_windows(request.query, request.documents, ranker, config);
    return build_ordered_results(request.query, std::move(ordered), request.documents);
}

nlohmann::ordered_json build_window_request(const std::string& model, const std::string& query,
                                            const std::vector<WindowDoc>& docs) {
    std::string listing;
    for (const WindowDoc& doc : docs) {
        listing += "[" + std::to_string(doc.index + 1) + "] " + doc.text + "\n";
    }
    const std::string system_prompt =
        "You rank passages by relevance to a query. Answer with the ranking only, "
        "most relevant first, as bracketed indices separated by ' > ', for example "
        "[2] > [1] > [3]. Use each index exactly once.";
    const std::string user_prompt =
        "Query: " + query + "\n\nPassages:\n" + listing + "\nRank the " +
        std::to_string(docs.size()) + " passages.";

    nlohmann::ordered_json body;
    body["model"] = model;
    body["messages"] = nlohmann::ordered_json::array({
        nlohmann::ordered_json{{"role", "system"}, {"content", system_prompt}},
        nlohmann::ordered_json{{"role", "user"}, {"content", user_prompt}},
    });
    body["temperature"] = 0;
    return body;
}

}  // namespace rerank
