#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rerank/distill.hpp"
#include "rerank/files.hpp"
#include "rerank/parity.hpp"
#include "rerank/registry.hpp"
#include "rerank/serialization.hpp"
#include "rerank/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBackend = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
    std::string model_type;
    std::string model;
    std::string provider = "reference";
    std::uint64_t seed = 0;
    std::string manifest_path;
    std::vector<std::string> options;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--model-type", flags.model_type,
                    "Model type alias: cross-encoder, t5, colbert, rankllm, api, flashrank")
        ->required();
    cmd->add_option("--model", flags.model, "Model reference (defaults per manifest)");
    cmd->add_option("--provider", flags.provider, "Inference provider: reference or external")
        ->check(CLI::IsMember({"reference", "external"}));
    cmd->add_option("--seed", flags.seed, "Seed for the reference provider");
    cmd->add_option("--manifest", flags.manifest_path, "Path to an alternate manifest file");
    cmd->add_option("--option", flags.options, "Backend option as key=value (repeatable)");
}

rerank::Manifest resolve_manifest(const CommonFlags& flags) {
    if (!flags.manifest_path.empty()) {
        return rerank::Manifest::load(flags.manifest_path);
    }
    return rerank::Manifest::builtin();
}

rerank::ProviderSet make_provider_set(const std::string& provider, std::uint64_t seed) {
    if (provider == "reference") {
        return rerank::reference_provider_set(seed);
    }
    return rerank::ProviderSet{};  // external: env-resolved backends only
}

rerank::ModelSpec make_spec(const CommonFlags& flags, const rerank::Manifest& manifest) {
    rerank::ModelSpec spec;
    spec.kind = rerank::parse_kind(flags.model_type);
    spec.model_ref =
        flags.model.empty() ? rerank::default_model_for(spec.kind, manifest) : flags.model;
    for (const std::string& option : flags.options) {
        const auto eq = option.find('=');
        if (eq == std::string::npos) {
            throw rerank::InvalidRecord("--option expects key=value, got '" + option + "'");
        }
        spec.options[option.substr(0, eq)] = option.substr(eq + 1);
    }
    return spec;
}

int report_error(const rerank::Error& e, int code) {
    std::cerr << e.what() << "\n";
    return code;
}

void print_tsv(std::ostream& out, const rerank::RankedResults& results) {
    for (const rerank::Result& r : results) {
        out << r.rank << '\t' << rerank::canonical_doc_id(r.doc_id()) << '\t';
        if (results.has_scores()) {
            out << rerank::shortest_double(*r.score);
        }
        out << '\n';
    }
}

struct RankFlags {
    CommonFlags common;
    std::string query;
    std::string docs_path;
    std::size_t top_k = 0;
    std::string format = "json";
};

int run_rank(const RankFlags& flags) {
    rerank::Manifest manifest;
    rerank::ModelSpec spec;
    std::vector<rerank::Document> documents;
    try {
        manifest = resolve_manifest(flags.common);
        spec = make_spec(flags.common, manifest);
        documents = rerank::load_documents_jsonl(flags.docs_path);
    } catch (const rerank::Error& e) {
        return report_error(e, kExitUsage);
    }

    try {
        const rerank::ProviderSet providers =
            make_provider_set(flags.common.provider, flags.common.seed);
        const rerank::Reranker handle = rerank::load_reranker(spec, providers, manifest);

        rerank::RankRequest request;
        request.query = flags.query;
        request.documents = std::move(documents);
        if (flags.top_k > 0) {
            request.desired_k = flags.top_k;
        }
        const rerank::RankedResults results = handle.rank(request);
        if (flags.format == "tsv") {
            print_tsv(std::cout, results);
        } else {
            std::cout << rerank::to_canonical_string(results) << "\n";
        }
        return kExitOk;
    } catch (const rerank::Error& e) {
        return report_error(e, kExitBackend);
    }
}

struct ExportFlags {
    CommonFlags common;
    std::string queries_path;
    std::string docs_path;
    std::string run_path;
    std::string out_path = "-";
    std::string format = "tsv";
};

int run_export(const ExportFlags& flags) {
    rerank::Manifest manifest;
    rerank::ModelSpec spec;
    try {
        manifest = resolve_manifest(flags.common);
        spec = make_spec(flags.common, manifest);
    } catch (const rerank::Error& e) {
        return report_error(e, kExitUsage);
    }

    try {
        const rerank::ProviderSet providers =
            make_provider_set(flags.common.provider, flags.common.seed);
        const rerank::Reranker handle = rerank::load_reranker(spec, providers, manifest);
        const rerank::ExportFormat format = flags.format == "jsonl"
                                                ? rerank::ExportFormat::Jsonl
                                                : rerank::ExportFormat::Tsv;
        if (flags.out_path == "-") {
            rerank::export_distillation(flags.queries_path, flags.run_path, flags.docs_path,
                                        handle, std::cout, format);
        } else {
            std::ofstream out(flags.out_path, std::ios::binary);
            if (!out) {
                throw rerank::InvalidRecord("cannot open output file '" + flags.out_path + "'");
            }
            rerank::export_distillation(flags.queries_path, flags.run_path, flags.docs_path,
                                        handle, out, format);
        }
        return kExitOk;
    } catch (const rerank::Error& e) {
        return report_error(e, kExitBackend);
    }
}

struct ServeFlags {
    CommonFlags common;  // model_type unused; kept for --seed/--manifest/--provider
    std::string config_path;
    std::string bind = "127.0.0.1:8080";
};

int run_serve(const std::string& config_path, const std::string& bind, std::uint64_t seed,
              const std::string& manifest_path) {
    rerank::Manifest manifest;
    std::vector<rerank::ServiceModelEntry> entries;
    std::string host;
    int port = 0;
    try {
        manifest = manifest_path.empty() ? rerank::Manifest::builtin()
                                         : rerank::Manifest::load(manifest_path);
        entries = rerank::load_service_config(config_path);
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos) {
            throw rerank::InvalidRecord("--bind expects host:port, got '" + bind + "'");
        }
        host = bind.substr(0, colon);
        port = std::stoi(bind.substr(colon + 1));
    } catch (const rerank::Error& e) {
        return report_error(e, kExitUsage);
    } catch (const std::exception& e) {
        std::cerr << "InvalidRecord: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const rerank::ProviderSet reference = rerank::reference_provider_set(seed);
        const rerank::ProviderSet external;
        bool any_reference = false;

        std::vector<std::pair<rerank::RankerKind, rerank::Reranker>> handles;
        for (const rerank::ServiceModelEntry& entry : entries) {
            rerank::ModelSpec spec;
            spec.kind = rerank::parse_kind(entry.alias);
            spec.model_ref = entry.model_ref.empty()
                                 ? rerank::default_model_for(spec.kind, manifest)
                                 : entry.model_ref;
            const bool use_reference = entry.provider == "reference";
            any_reference = any_reference || use_reference;
            handles.emplace_back(spec.kind,
                                 rerank::load_reranker(spec, use_reference ? reference : external,
                                                       manifest));
        }
        rerank::RerankService service(std::move(handles),
                                      any_reference ? reference : external, manifest);
        std::cerr << "serving on " << host << ":" << port << "\n";
        service.run(host, port);
        return kExitOk;
    } catch (const rerank::Error& e) {
        return report_error(e, kExitBackend);
    }
}

int run_parity(const std::string& baseline_path, const std::string& candidate_path,
               double min_tau, double max_delta) {
    auto load_side = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw rerank::InvalidRecord("cannot open results file '" + path + "'");
        }
        nlohmann::json parsed;
        try {
            parsed = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw rerank::InvalidRecord(path + ": invalid JSON: " + e.what());
        }
        if (!parsed.is_array()) {
            throw rerank::InvalidRecord(path + ": expected an array of RankedResults objects");
        }
        std::vector<rerank::RankedResults> side;
        for (const auto& item : parsed) {
            side.push_back(rerank::ranked_results_from_json(item));
        }
        return side;
    };

    try {
        const auto baseline = load_side(baseline_path);
        const auto candidate = load_side(candidate_path);
        rerank::ParityThresholds thresholds;
        thresholds.min_tau = min_tau;
        thresholds.max_score_delta = max_delta;
        const rerank::ParityReport report =
            rerank::parity_check(baseline, candidate, thresholds);
        std::cout << rerank::parity_report_to_json(report).dump(2) << "\n";
        return report.pass ? kExitOk : kExitBackend;
    } catch (const rerank::Error& e) {
        return report_error(e, kExitUsage);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unified re-ranking engine: load a reranker, rank documents, export "
                 "distillation scores, serve over REST, or compare result sets."};
    app.require_subcommand(1);

    RankFlags rank_flags;
    CLI::App* rank_cmd = app.add_subcommand("rank", "Re-rank a JSONL document file for a query");
    add_common_flags(rank_cmd, rank_flags.common);
    rank_cmd->add_option("--query", rank_flags.query, "Query text")->required();
    rank_cmd->add_option("--docs", rank_flags.docs_path, "Path to JSONL documents")->required();
    rank_cmd->add_option("--top-k", rank_flags.top_k, "Keep only the first k results");
    rank_cmd->add_option("--format", rank_flags.format, "Output format")
        ->check(CLI::IsMember({"json", "tsv"}));

    ExportFlags export_flags;
    CLI::App* export_cmd =
        app.add_subcommand("export", "Export distillation scores for a run file");
    add_common_flags(export_cmd, export_flags.common);
    export_cmd->add_option("--queries", export_flags.queries_path, "JSONL of {query_id, query}")
        ->required();
    export_cmd->add_option("--docs", export_flags.docs_path, "JSONL document corpus")->required();
    export_cmd->add_option("--run", export_flags.run_path, "TSV of query_id<TAB>doc_id")
        ->required();
    export_cmd->add_option("--out", export_flags.out_path, "Output path ('-' for stdout)");
    export_cmd->add_option("--format", export_flags.format, "Output format")
        ->check(CLI::IsMember({"tsv", "jsonl"}));

    std::string serve_config, serve_bind = "127.0.0.1:8080", serve_manifest;
    std::uint64_t serve_seed = 0;
    CLI::App* serve_cmd = app.add_subcommand("serve", "Serve POST /rerank and GET /health");
    serve_cmd->add_option("--config", serve_config, "Model list: <alias> <provider> [model_ref]")
        ->required();
    serve_cmd->add_option("--bind", serve_bind, "host:port to bind");
    serve_cmd->add_option("--seed", serve_seed, "Seed for the reference provider");
    serve_cmd->add_option("--manifest", serve_manifest, "Path to an alternate manifest file");

    std::string parity_baseline, parity_candidate;
    double parity_min_tau = 0.99, parity_max_delta = 1e-4;
    CLI::App* parity_cmd =
        app.add_subcommand("parity", "Compare two result-set files (JSON arrays)");
    parity_cmd->add_option("--baseline", parity_baseline, "Baseline results file")->required();
    parity_cmd->add_option("--candidate", parity_candidate, "Candidate results file")->required();
    parity_cmd->add_option("--min-tau", parity_min_tau, "Minimum Kendall tau to pass");
    parity_cmd->add_option("--max-delta", parity_max_delta, "Maximum per-query score delta");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (rank_cmd->parsed()) return run_rank(rank_flags);
    if (export_cmd->parsed()) return run_export(export_flags);
    if (serve_cmd->parsed()) return run_serve(serve_config, serve_bind, serve_seed, serve_manifest);
    if (parity_cmd->parsed()) {
        return run_parity(parity_baseline, parity_candidate, parity_min_tau, parity_max_delta);
    }
    return kExitUsage;
}
