// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit code is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "rerank/distill.hpp"
#include "rerank/parity.hpp"
#include "rerank/pointwise.hpp"
#include "rerank/reference_provider.hpp"
#include "rerank/registry.hpp"
#include "rerank/serialization.hpp"
#include "rerank/service.hpp"
#include "rerank/testing/scripted_server.hpp"

using namespace rerank;

namespace {

// ---------------------------------------------------------------- harness

struct Checker {
    int failures = 0;
    std::vector<std::string> messages;

    void require(bool condition, const std::string& what) {
        if (!condition) {
            ++failures;
            if (messages.size() < 8) {
                messages.push_back(what);
            }
        }
    }
};

struct Criterion {
    std::string name;
    std::function<void(Checker&)> run;
};

// ---------------------------------------------------------------- helpers

class TempFile {
public:
    explicit TempFile(const std::string& content) {
        path_ = (std::filesystem::temp_directory_path() /
                 ("rerank_accept_" + std::to_string(counter_++) + "_" +
                  std::to_string(::getpid())))
                    .string();
        std::ofstream out(path_, std::ios::binary);
        out << content;
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

private:
    static inline int counter_ = 0;
    std::string path_;
};

class EnvGuard {
public:
    explicit EnvGuard(const char* name) : name_(name) {
        const char* current = std::getenv(name);
        if (current) saved_ = current;
        unsetenv(name);
    }
    ~EnvGuard() {
        if (saved_) {
            setenv(name_, saved_->c_str(), 1);
        } else {
            unsetenv(name_);
        }
    }

private:
    const char* name_;
    std::optional<std::string> saved_;
};

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string command = std::string(RERANK_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) return result;
    char buffer[4096];
    std::size_t n;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.output.append(buffer, n);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

// Full core invariant suite applied to one backend output.
void check_core_invariants(Checker& check, const RankedResults& results,
                           const std::vector<Document>& input, bool expect_scores,
                           const std::string& label) {
    check.require(results.size() == input.size(), label + ": size mismatch");
    check.require(results.has_scores() == expect_scores, label + ": has_scores mismatch");

    for (std::size_t i = 0; i < results.size(); ++i) {
        check.require(results.at(i).rank == i + 1, label + ": ranks are not 1..n");
        check.require(results.at(i).score.has_value() == results.has_scores(),
                      label + ": score presence incoherent");
        if (results.has_scores() && i > 0) {
            check.require(*results.at(i - 1).score >= *results.at(i).score,
                          label + ": scores increase along the sequence");
        }
    }

    // permutation safety: (doc_id, text, metadata) multiset preserved
    std::vector<Document> in = input, out;
    out.reserve(results.size());
    for (const Result& r : results) out.push_back(r.document);
    auto less = [](const Document& a, const Document& b) { return document_less(a, b); };
    std::sort(in.begin(), in.end(), less);
    std::sort(out.begin(), out.end(), less);
    check.require(in == out, label + ": document multiset changed");

    // top_k prefix law
    for (std::size_t k : {std::size_t(1), std::size_t(3), results.size()}) {
        const auto prefix = results.top_k(k);
        const std::size_t expected = std::min(k, results.size());
        check.require(prefix.size() == expected, label + ": top_k size");
        for (std::size_t i = 0; i < expected; ++i) {
            check.require(prefix.at(i) == results.at(i), label + ": top_k is not a prefix");
        }
    }

    // lookup coherence
    if (results.has_scores()) {
        for (const Result& r : results) {
            check.require(results.get_score_by_docid(r.doc_id()) == *r.score,
                          label + ": get_score_by_docid mismatch");
        }
    }
}

// O(n^2) Kendall tau oracle over two orders of the same id set.
double kendall_brute_force(const std::vector<int>& order_a, const std::vector<int>& order_b) {
    std::map<int, std::size_t> pos_a, pos_b;
    for (std::size_t i = 0; i < order_a.size(); ++i) pos_a[order_a[i]] = i;
    for (std::size_t i = 0; i < order_b.size(); ++i) pos_b[order_b[i]] = i;
    long long concordant = 0, discordant = 0;
    for (std::size_t i = 0; i < order_a.size(); ++i) {
        for (std::size_t j = i + 1; j < order_a.size(); ++j) {
            const int x = order_a[i], y = order_a[j];
            ((pos_a[x] < pos_a[y]) == (pos_b[x] < pos_b[y]) ? concordant : discordant)++;
        }
    }
    const long long total = concordant + discordant;
    return total == 0 ? 1.0
                      : static_cast<double>(concordant - discordant) / static_cast<double>(total);
}

RankedResults results_from_order(const std::string& query, const std::vector<int>& order) {
    std::vector<std::pair<Document, double>> scored;
    double score = static_cast<double>(order.size());
    for (int id : order) {
        Document doc;
        doc.doc_id = static_cast<std::int64_t>(id);
        doc.text = "doc" + std::to_string(id);
        scored.emplace_back(std::move(doc), score);
        score -= 1.0;
    }
    return build_ranked_results(query, std::move(scored));
}

Reranker reference_handle(RankerKind kind, std::uint64_t seed) {
    ModelSpec spec;
    spec.kind = kind;
    spec.model_ref = default_model_for(kind);
    return load_reranker(spec, reference_provider_set(seed));
}

// ---------------------------------------------------------------- criteria

// 1. Core ordering suite over 10,000 randomized score sets.
void criterion_core_ordering(Checker& check) {
    std::mt19937 rng(101);
    std::uniform_int_distribution<int> size_dist(0, 64);
    std::uniform_int_distribution<int> tie_dist(-6, 6);
    std::uniform_real_distribution<double> real_dist(-100.0, 100.0);

    for (int round = 0; round < 10000; ++round) {
        const int n = size_dist(rng);
        const bool tie_heavy = round % 2 == 0;
        std::vector<std::pair<Document, double>> scored;
        std::vector<Document> input;
        scored.reserve(n);
        for (int i = 0; i < n; ++i) {
            Document doc;
            doc.doc_id = static_cast<std::int64_t>(i);
            doc.text = "d" + std::to_string(i);
            input.push_back(doc);
            const double score =
                tie_heavy ? static_cast<double>(tie_dist(rng)) : real_dist(rng);
            scored.emplace_back(std::move(doc), score);
        }
        const auto results = build_ranked_results("q", scored);

        bool ok = results.size() == static_cast<std::size_t>(n);
        for (std::size_t i = 0; ok && i < results.size(); ++i) {
            ok = results.at(i).rank == i + 1 && results.at(i).score.has_value();
            if (ok && i > 0) {
                const double prev = *results.at(i - 1).score;
                const double cur = *results.at(i).score;
                ok = prev >= cur;
                if (ok && prev == cur) {
                    // stability on ties: input position increases
                    ok = std::get<std::int64_t>(results.at(i - 1).doc_id()) <
                         std::get<std::int64_t>(results.at(i).doc_id());
                }
            }
        }
        check.require(ok, "coherence/stability failed at round " + std::to_string(round));

        std::vector<Document> out;
        for (const Result& r : results) out.push_back(r.document);
        auto less = [](const Document& a, const Document& b) { return document_less(a, b); };
        std::sort(input.begin(), input.end(), less);
        std::sort(out.begin(), out.end(), less);
        check.require(input == out, "permutation safety failed at round " + std::to_string(round));

        const std::size_t k = static_cast<std::size_t>(rng() % 70);
        const auto prefix = results.top_k(k);
        bool prefix_ok = prefix.size() == std::min(k, results.size());
        for (std::size_t i = 0; prefix_ok && i < prefix.size(); ++i) {
            prefix_ok = prefix.at(i) == results.at(i);
        }
        check.require(prefix_ok, "top_k prefix law failed at round " + std::to_string(round));
    }
}

// 2. Two-document contract fixture, exact equality.
void criterion_fixture(Checker& check) {
    std::vector<std::pair<Document, double>> scored = {
        {Document{std::int64_t(0), "I hate you", {{"source", MetaValue(std::string("twitter"))}}},
         -4.14453125},
        {Document{std::int64_t(1), "I really like you",
                  {{"source", MetaValue(std::string("reddit"))}}},
         -2.453125},
    };
    const auto results = build_ranked_results("I love you", scored);

    check.require(results.size() == 2, "fixture: wrong size");
    check.require(results.at(0).doc_id() == DocId(std::int64_t(1)), "fixture: wrong order");
    check.require(results.at(1).doc_id() == DocId(std::int64_t(0)), "fixture: wrong order");
    check.require(results.at(0).rank == 1 && results.at(1).rank == 2, "fixture: ranks");
    check.require(results.top_k(1).at(0).text() == "I really like you",
                  "fixture: top_k(1).text mismatch");
    check.require(results.get_score_by_docid(DocId(std::int64_t(1))) == -2.453125,
                  "fixture: get_score_by_docid(1) != -2.453125");
    check.require(results.get_score_by_docid(DocId(std::int64_t(0))) == -4.14453125,
                  "fixture: get_score_by_docid(0) != -4.14453125");
    check.require(results.at(0).document.metadata.at("source") ==
                      MetaValue(std::string("reddit")),
                  "fixture: metadata does not follow input pairing");
}

// 3. MaxSim vs the double-loop oracle plus monotonicity and permutation
//    invariance on every case.
void criterion_maxsim(Checker& check) {
    std::mt19937 rng(301);
    std::uniform_int_distribution<std::size_t> rows_dist(1, 16);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 32);
    std::uniform_real_distribution<double> value_dist(-2.0, 2.0);

    auto random_matrix = [&](std::size_t rows, std::size_t dim) {
        std::vector<double> values(rows * dim);
        for (double& v : values) v = value_dist(rng);
        return EmbeddingMatrix(rows, dim, std::move(values), false);
    };

    for (int round = 0; round < 1000; ++round) {
        const std::size_t dim = dim_dist(rng);
        const auto q = random_matrix(rows_dist(rng), dim);
        const auto d = random_matrix(rows_dist(rng), dim);

        double expected = 0.0;
        for (std::size_t i = 0; i < q.rows(); ++i) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < d.rows(); ++j) {
                double dot = 0.0;
                for (std::size_t k = 0; k < dim; ++k) dot += q.row(i)[k] * d.row(j)[k];
                best = std::max(best, dot);
            }
            expected += best;
        }
        const double got = maxsim_score(q, d);
        const double tolerance = 1e-9 * std::max(1.0, std::abs(expected));
        check.require(std::abs(got - expected) <= tolerance,
                      "maxsim differs from brute force at round " + std::to_string(round));

        // doc-token monotonicity
        std::vector<double> extra(dim);
        for (double& v : extra) v = value_dist(rng);
        check.require(maxsim_score(q, d.with_row_appended(extra)) >= got,
                      "maxsim decreased when appending a doc row at round " +
                          std::to_string(round));

        // doc-row permutation invariance, bit-identical
        std::vector<std::size_t> perm(d.rows());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> shuffled;
        shuffled.reserve(d.values().size());
        for (std::size_t j : perm) {
            shuffled.insert(shuffled.end(), d.row(j).begin(), d.row(j).end());
        }
        const EmbeddingMatrix d_perm(d.rows(), d.dim(), std::move(shuffled), false);
        check.require(maxsim_score(q, d_perm) == got,
                      "maxsim not bit-identical under doc permutation at round " +
                          std::to_string(round));
    }
}

// 4. Seq2seq softmax: exactness, stability, symmetry.
void criterion_seq2seq(Checker& check) {
    check.require(true_probability(LogitPair{0.0, 0.0}) == 0.5, "p(0,0) != 0.5 exactly");
    check.require(std::abs(true_probability(LogitPair{std::log(3.0), 0.0}) - 0.75) <= 1e-12,
                  "p(ln 3, 0) != 0.75 within 1e-12");
    const double extreme = true_probability(LogitPair{1000.0, 0.0});
    check.require(std::isfinite(extreme) && std::abs(extreme - 1.0) <= 1e-12,
                  "p(1000, 0) overflowed or is not 1.0");

    std::mt19937 rng(401);
    std::uniform_real_distribution<double> dist(-700.0, 700.0);
    for (int i = 0; i < 10000; ++i) {
        const double a = dist(rng), b = dist(rng);
        const double sum = true_probability(LogitPair{a, b}) + true_probability(LogitPair{b, a});
        check.require(std::abs(sum - 1.0) <= 1e-12,
                      "p(a,b) + p(b,a) != 1 for a=" + std::to_string(a) +
                          " b=" + std::to_string(b));
    }
}

// 5. Sliding-window carry-forward, exhaustive configurations, plus repair
//    safety under malformed permutation strings.
void criterion_sliding_window(Checker& check) {
    std::mt19937 rng(501);
    int configurations = 0;
    for (std::size_t n = 1; n <= 12; ++n) {
        std::vector<Document> docs;
        for (std::size_t i = 0; i < n; ++i) {
            Document doc;
            doc.doc_id = static_cast<std::int64_t>(i);
            doc.text = "doc" + std::to_string(i);
            docs.push_back(std::move(doc));
        }
        for (std::size_t window = 2; window <= 6; ++window) {
            for (std::size_t stride = 1; stride < window; ++stride) {
                ++configurations;
                for (int trial = 0; trial < 3; ++trial) {
                    std::vector<double> relevance(n);
                    for (std::size_t i = 0; i < n; ++i) relevance[i] = static_cast<double>(i);
                    std::shuffle(relevance.begin(), relevance.end(), rng);
                    std::map<std::string, double> table;
                    for (std::size_t i = 0; i < n; ++i) table[docs[i].text] = relevance[i];

                    OracleWindowRanker oracle([table](const std::string& text) {
                        return table.at(text);
                    });
                    SlidingWindowConfig config;
                    config.window_size = window;
                    config.stride = stride;
                    config.passes = 1;
                    const auto ordered = slide_windows("q", docs, oracle, config);

                    check.require(ordered.size() == n, "sliding window lost documents");
                    double best = -1.0;
                    for (const auto& [text, value] : table) best = std::max(best, value);
                    check.require(table.at(ordered.front().text) == best,
                                  "max-relevance doc not at position 0 for n=" +
                                      std::to_string(n) + " w=" + std::to_string(window) +
                                      " s=" + std::to_string(stride));

                    std::vector<std::int64_t> ids;
                    for (const Document& doc : ordered) {
                        ids.push_back(std::get<std::int64_t>(doc.doc_id));
                    }
                    std::sort(ids.begin(), ids.end());
                    bool is_permutation = true;
                    for (std::size_t i = 0; i < n; ++i) {
                        is_permutation = is_permutation && ids[i] == static_cast<std::int64_t>(i);
                    }
                    check.require(is_permutation, "sliding window output not a permutation");
                }
            }
        }
    }
    check.require(configurations == 12 * (1 + 2 + 3 + 4 + 5),
                  "unexpected configuration count " + std::to_string(configurations));

    // randomized malformed permutation strings through parse repair
    const std::string alphabet = "[]0123456789>, x";
    std::uniform_int_distribution<int> len_dist(0, 60);
    for (int trial = 0; trial < 3000; ++trial) {
        std::string raw;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) {
            raw += alphabet[rng() % alphabet.size()];
        }
        const std::size_t w = 1 + static_cast<std::size_t>(trial % 6);
        try {
            const Permutation perm = parse_permutation(raw, w);
            std::vector<std::size_t> sorted = perm.order;
            std::sort(sorted.begin(), sorted.end());
            bool is_permutation = sorted.size() == w;
            for (std::size_t i = 0; is_permutation && i < w; ++i) {
                is_permutation = sorted[i] == i;
            }
            check.require(is_permutation, "repair produced a non-permutation for: " + raw);
        } catch (const UnparseableWindow&) {
            // legal outcome when no valid index survives
        }
    }
}

// 6. Swap property: the same call shape across all five families.
void criterion_swap(Checker& check) {
    const std::uint64_t seed = 601;
    std::mt19937 rng(seed);

    std::vector<std::string> texts;
    std::vector<DocId> ids;
    std::vector<Metadata> metadata;
    for (int i = 0; i < 20; ++i) {
        texts.push_back("passage " + std::to_string(i) + " about subject " +
                        std::to_string(rng() % 5));
        if (i % 3 == 0) {
            ids.emplace_back(std::string("doc-" + std::to_string(i)));
        } else {
            ids.emplace_back(static_cast<std::int64_t>(i));
        }
        Metadata m;
        if (i % 2 == 0) m["shard"] = static_cast<std::int64_t>(i % 4);
        metadata.push_back(std::move(m));
    }
    const auto input_docs = normalize_inputs(texts, ids, metadata);
    const std::string query = "subject 3 passage";

    // scripted hosted endpoint covering all 20 documents, twice (determinism)
    nlohmann::ordered_json api_results = nlohmann::ordered_json::array();
    std::vector<int> order(20);
    for (int i = 0; i < 20; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < 20; ++i) {
        api_results.push_back({{"index", order[i]}, {"relevance_score", 1.0 - 0.04 * i}});
    }
    const std::string api_body = nlohmann::ordered_json{{"results", api_results}}.dump();
    testing::ScriptedServer server({{200, api_body}});

    ApiConfig api_config;
    api_config.endpoint_url = server.url("/v1/rerank");
    api_config.credential = "swap-test-key";
    api_config.backoff_base_ms = 1;

    ProviderSet providers = reference_provider_set(seed);
    providers.set_api_config(api_config);

    for (RankerKind kind : all_ranker_kinds()) {
        ModelSpec spec;
        spec.kind = kind;
        spec.model_ref = default_model_for(kind);
        const Reranker handle = load_reranker(spec, providers);

        const auto results = handle.rank(query, texts, ids, metadata);
        const bool expect_scores = kind != RankerKind::ListwiseLLM;
        check_core_invariants(check, results, input_docs, expect_scores,
                              "swap/" + kind_alias(kind));

        const auto again = handle.rank(query, texts, ids, metadata);
        check.require(to_canonical_string(results) == to_canonical_string(again),
                      "swap/" + kind_alias(kind) + ": not deterministic");
    }
}

// 7. Error informativeness with each capability removed.
void criterion_error_informativeness(Checker& check) {
    EnvGuard llm_endpoint("RERANK_LLM_ENDPOINT");
    EnvGuard api_key("RERANK_API_KEY");
    EnvGuard api_endpoint("RERANK_API_ENDPOINT");

    const ProviderSet empty;
    ProviderSet unquantized_only;
    unquantized_only.add_provider("default", std::make_shared<ReferenceProvider>(0));

    struct Case {
        RankerKind kind;
        const ProviderSet* providers;
        std::string expected_requirement;
    };
    const std::vector<Case> cases = {
        {RankerKind::CrossEncoder, &empty, "slot 'default'"},
        {RankerKind::Seq2Seq, &empty, "slot 'default'"},
        {RankerKind::LateInteraction, &empty, "slot 'default'"},
        {RankerKind::OptimizedCPU, &unquantized_only, "slot 'quantized'"},
        {RankerKind::ListwiseLLM, &empty, "RERANK_LLM_ENDPOINT"},
        {RankerKind::HostedAPI, &empty, "RERANK_API_KEY"},
    };

    for (const Case& c : cases) {
        ModelSpec spec;
        spec.kind = c.kind;
        spec.model_ref = default_model_for(c.kind);
        bool threw = false;
        try {
            load_reranker(spec, *c.providers);
        } catch (const CapabilityMissing& e) {
            threw = true;
            const std::string message = e.what();
            check.require(message.find(kind_alias(c.kind)) != std::string::npos,
                          kind_alias(c.kind) + ": message lacks the kind");
            check.require(message.find("missing") != std::string::npos,
                          kind_alias(c.kind) + ": message lacks the requirement marker");
            check.require(message.find(c.expected_requirement) != std::string::npos,
                          kind_alias(c.kind) + ": message lacks '" + c.expected_requirement +
                              "'");
            check.require(message.find("Hint:") != std::string::npos,
                          kind_alias(c.kind) + ": message lacks a remediation hint");
        } catch (const std::exception& e) {
            check.require(false, kind_alias(c.kind) + ": wrong exception type: " + e.what());
            threw = true;
        }
        check.require(threw, kind_alias(c.kind) + ": load unexpectedly succeeded");
    }
}

// 8. CLI / service / library equivalence plus export determinism.
void criterion_equivalence(Checker& check) {
    const std::uint64_t seed = 801;
    std::mt19937 rng(901);
    const std::vector<RankerKind> offline_kinds = {
        RankerKind::CrossEncoder, RankerKind::Seq2Seq, RankerKind::LateInteraction,
        RankerKind::ListwiseLLM, RankerKind::OptimizedCPU};

    std::map<RankerKind, Reranker> library;
    std::vector<std::pair<RankerKind, Reranker>> service_handles;
    for (RankerKind kind : offline_kinds) {
        library.emplace(kind, reference_handle(kind, seed));
        service_handles.emplace_back(kind, reference_handle(kind, seed));
    }
    RerankService service(std::move(service_handles), reference_provider_set(seed));
    const int port = service.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(std::chrono::seconds(10));

    const std::vector<std::string> words = {"alpha", "beta",  "gamma", "delta",
                                            "omega", "sigma", "kappa", "lambda"};
    auto random_text = [&] {
        std::string text;
        const int len = 2 + static_cast<int>(rng() % 5);
        for (int i = 0; i < len; ++i) {
            if (i) text += " ";
            text += words[rng() % words.size()];
        }
        return text;
    };

    for (int round = 0; round < 50; ++round) {
        const RankerKind kind = offline_kinds[rng() % offline_kinds.size()];
        const std::string query = random_text();
        const int n = 2 + static_cast<int>(rng() % 6);

        std::vector<std::string> texts;
        std::vector<DocId> ids;
        std::vector<Metadata> metadata;
        nlohmann::ordered_json docs_json = nlohmann::ordered_json::array();
        std::string docs_jsonl;
        for (int i = 0; i < n; ++i) {
            texts.push_back(random_text());
            if (rng() % 2 == 0) {
                ids.emplace_back(static_cast<std::int64_t>(100 + i));
            } else {
                ids.emplace_back(std::string("id-" + std::to_string(i)));
            }
            Metadata m;
            if (rng() % 2 == 0) m["idx"] = static_cast<std::int64_t>(i);
            if (rng() % 3 == 0) m["tag"] = words[rng() % words.size()];
            metadata.push_back(m);

            nlohmann::ordered_json record;
            record["doc_id"] = doc_id_to_json(ids.back());
            record["text"] = texts.back();
            record["metadata"] = metadata_to_json(m);
            docs_json.push_back(record);
            docs_jsonl += record.dump() + "\n";
        }
        const std::optional<std::size_t> top_k =
            rng() % 3 == 0 ? std::optional<std::size_t>(1 + rng() % n) : std::nullopt;

        // library reference result
        RankRequest request;
        request.query = query;
        request.documents = normalize_inputs(texts, ids, metadata);
        request.desired_k = top_k;
        const RankedResults expected = library.at(kind).rank(request);

        // CLI
        TempFile docs_file(docs_jsonl);
        std::string args = "rank --model-type " + kind_alias(kind) + " --provider reference" +
                           " --seed " + std::to_string(seed) + " --query " + shell_quote(query) +
                           " --docs " + shell_quote(docs_file.path());
        if (top_k) args += " --top-k " + std::to_string(*top_k);
        const CliResult cli = run_cli(args);
        check.require(cli.exit_code == 0,
                      "CLI exited " + std::to_string(cli.exit_code) + " on round " +
                          std::to_string(round));
        if (cli.exit_code == 0) {
            try {
                const auto parsed = ranked_results_from_json(nlohmann::json::parse(cli.output));
                check.require(parsed == expected,
                              "CLI output differs from library on round " +
                                  std::to_string(round));
            } catch (const std::exception& e) {
                check.require(false, std::string("CLI output unparseable: ") + e.what());
            }
        }

        // service
        nlohmann::ordered_json body;
        body["model_type"] = kind_alias(kind);
        body["query"] = query;
        body["documents"] = docs_json;
        if (top_k) body["top_k"] = *top_k;
        const auto response = client.Post("/rerank", body.dump(), "application/json");
        check.require(bool(response) && response->status == 200,
                      "service POST failed on round " + std::to_string(round));
        if (response && response->status == 200) {
            try {
                const auto parsed =
                    ranked_results_from_json(nlohmann::json::parse(response->body));
                check.require(parsed == expected,
                              "service output differs from library on round " +
                                  std::to_string(round));
            } catch (const std::exception& e) {
                check.require(false, std::string("service output unparseable: ") + e.what());
            }
        }
    }
    service.stop();

    // export determinism, library and CLI
    const std::string queries_jsonl =
        "{\"query_id\": \"q1\", \"query\": \"alpha beta\"}\n"
        "{\"query_id\": \"q2\", \"query\": \"gamma delta\"}\n";
    std::string corpus_jsonl, run_tsv;
    for (int i = 0; i < 6; ++i) {
        corpus_jsonl += "{\"doc_id\": " + std::to_string(i) + ", \"text\": \"" +
                        words[i % words.size()] + " text " + std::to_string(i) + "\"}\n";
        run_tsv += std::string(i % 2 == 0 ? "q1" : "q2") + "\t" + std::to_string(i) + "\n";
    }
    TempFile queries_file(queries_jsonl);
    TempFile corpus_file(corpus_jsonl);
    TempFile run_file(run_tsv);

    std::ostringstream first, second;
    export_distillation(queries_file.path(), run_file.path(), corpus_file.path(),
                        reference_handle(RankerKind::CrossEncoder, seed), first);
    export_distillation(queries_file.path(), run_file.path(), corpus_file.path(),
                        reference_handle(RankerKind::CrossEncoder, seed), second);
    check.require(!first.str().empty() && first.str() == second.str(),
                  "library export is not byte-identical across runs");

    const std::string export_args =
        "export --model-type cross-encoder --provider reference --seed " +
        std::to_string(seed) + " --queries " + shell_quote(queries_file.path()) + " --docs " +
        shell_quote(corpus_file.path()) + " --run " + shell_quote(run_file.path());
    const CliResult export_a = run_cli(export_args);
    const CliResult export_b = run_cli(export_args);
    check.require(export_a.exit_code == 0 && export_b.exit_code == 0,
                  "CLI export failed");
    check.require(!export_a.output.empty() && export_a.output == export_b.output,
                  "CLI export is not byte-identical across runs");
    check.require(export_a.output == first.str(), "CLI export differs from library export");
}

// 9. API client robustness against a scripted endpoint.
void criterion_api_robustness(Checker& check) {
    const std::string secret = "acceptance-secret-key";
    auto base_config = [&](const testing::ScriptedServer& server) {
        ApiConfig config;
        config.endpoint_url = server.url("/v1/rerank");
        config.credential = secret;
        config.model_name = "rerank-check";
        config.timeout_ms = 1000;
        config.max_retries = 2;
        config.backoff_base_ms = 1;
        return config;
    };
    const auto docs = normalize_inputs({"first", "second"});
    const char* good_body =
        R"({"results":[{"index":1,"relevance_score":0.9},{"index":0,"relevance_score":0.1}]})";

    {  // happy path
        testing::ScriptedServer server({{200, good_body}});
        const auto results = api_rerank(base_config(server), "q", docs);
        check.require(results.size() == 2 && results.at(0).doc_id() == DocId(std::int64_t(1)),
                      "api: happy-path mapping wrong");
    }
    {  // 429 then success, telemetry records one retry
        testing::ScriptedServer server({{429, "later"}, {200, good_body}});
        const HostedApiClient client(base_config(server));
        const auto results = client.rerank("q", docs);
        check.require(results.size() == 2, "api: retry path failed");
        check.require(client.telemetry().retries == 1, "api: retry not recorded");
        check.require(server.request_count() == 2, "api: unexpected attempt count");
    }
    {  // retry bound
        testing::ScriptedServer server({{429, "later"}});
        ApiConfig config = base_config(server);
        config.max_retries = 3;
        const HostedApiClient client(config);
        bool threw = false;
        try {
            client.rerank("q", docs);
        } catch (const RateLimited&) {
            threw = true;
        }
        check.require(threw, "api: rate limit not raised");
        check.require(server.request_count() == 4,
                      "api: attempts " + std::to_string(server.request_count()) +
                          " exceed 1 + max_retries");
    }
    {  // timeout
        testing::ScriptedServer server({{200, good_body, "application/json", 1500}});
        ApiConfig config = base_config(server);
        config.timeout_ms = 100;
        bool threw = false;
        try {
            api_rerank(config, "q", docs);
        } catch (const Timeout&) {
            threw = true;
        }
        check.require(threw, "api: timeout not raised");
    }
    {  // malformed bodies
        for (const char* body : {"{bad json", R"({"results":[{"index":7,"relevance_score":1}]})",
                                 R"({"results":[{"index":0,"relevance_score":1},
                                                {"index":0,"relevance_score":0.4}]})"}) {
            testing::ScriptedServer server({{200, body}});
            bool threw = false;
            try {
                api_rerank(base_config(server), "q", docs);
            } catch (const MalformedResponse&) {
                threw = true;
            }
            check.require(threw, std::string("api: malformed body accepted: ") + body);
        }
    }
    {  // credential redaction over every error path
        const std::vector<testing::ScriptedResponse> scripts = {
            {401, "denied for key " + secret},
            {418, "teapot " + secret},
            {200, secret + " {unparseable"},
        };
        for (const auto& scripted : scripts) {
            testing::ScriptedServer server({scripted});
            try {
                api_rerank(base_config(server), "q", docs);
                check.require(false, "api: expected an error");
            } catch (const Error& e) {
                const std::string rendered = e.what();
                check.require(rendered.find(secret) == std::string::npos,
                              "api: credential leaked into error: " + rendered);
            }
        }
    }
}

// 10. Kendall tau against brute-force pair counting.
void criterion_parity_selfcheck(Checker& check) {
    // exhaustive over all permutations for n <= 6
    for (int n = 1; n <= 6; ++n) {
        std::vector<int> identity(n), perm(n);
        for (int i = 0; i < n; ++i) identity[i] = perm[i] = i;
        const auto baseline = results_from_order("q", identity);
        do {
            const auto report = parity_check({baseline}, {results_from_order("q", perm)});
            const double expected = kendall_brute_force(identity, perm);
            check.require(report.per_query[0].tau == expected,
                          "tau mismatch for n=" + std::to_string(n));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    // 1000 random n = 10 cases
    std::mt19937 rng(1001);
    std::vector<int> base(10);
    for (int i = 0; i < 10; ++i) base[i] = i;
    for (int round = 0; round < 1000; ++round) {
        std::vector<int> a = base, b = base;
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        const auto report =
            parity_check({results_from_order("q", a)}, {results_from_order("q", b)});
        const double expected = kendall_brute_force(a, b);
        check.require(std::abs(report.per_query[0].tau - expected) <= 1e-12,
                      "tau mismatch at round " + std::to_string(round));
    }
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"core ordering suite (10,000 cases, < 5 s)", criterion_core_ordering},
        {"two-document contract fixture, exact", criterion_fixture},
        {"maxsim vs brute-force oracle (1,000 pairs, < 10 s)", criterion_maxsim},
        {"seq2seq softmax exactness and symmetry", criterion_seq2seq},
        {"sliding-window carry-forward, exhaustive configs", criterion_sliding_window},
        {"swap property across all five families", criterion_swap},
        {"capability errors are informative", criterion_error_informativeness},
        {"CLI/service/library equivalence and export determinism", criterion_equivalence},
        {"hosted API client robustness", criterion_api_robustness},
        {"Kendall tau vs brute-force pair counting", criterion_parity_selfcheck},
    };
    const std::vector<double> time_limits = {5.0, 60.0, 10.0, 60.0, 60.0,
                                             60.0, 60.0, 120.0, 60.0, 60.0};

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Checker check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].run(check);
        } catch (const std::exception& e) {
            check.require(false, std::string("unhandled exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        check.require(seconds < time_limits[i],
                      "runtime " + std::to_string(seconds) + " s exceeds limit");

        const bool pass = check.failures == 0;
        failed += pass ? 0 : 1;
        std::printf("[%s] %zu. %s (%.2f s)\n", pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), seconds);
        for (const std::string& message : check.messages) {
            std::printf("       - %s\n", message.c_str());
        }
        if (check.failures > static_cast<int>(check.messages.size())) {
            std::printf("       - ... and %d more failures\n",
                        check.failures - static_cast<int>(check.messages.size()));
        }
    }
    return failed;
}
