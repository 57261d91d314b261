#include "rerank/manifest.hpp"

#include <fstream>
#include <sstream>

#include "rerank/errors.hpp"

namespace rerank {

namespace {

constexpr const char* kBuiltinManifest = R"(# Reranker model manifest: default model per kind plus the capability
# requirement text used by CapabilityMissing errors. Keys are the model-type
# aliases accepted by parse_kind.

cross-encoder.default_model = cross-encoder/ms-marco-MiniLM-L-6-v2
cross-encoder.requires      = an inference provider registered in slot 'default'
cross-encoder.hint          = register a provider with ProviderSet::add_provider("default", ...) or run with --provider reference

t5.default_model = castorini/monot5-base-msmarco-10k
t5.requires      = an inference provider registered in slot 'default'
t5.hint          = register a provider with ProviderSet::add_provider("default", ...) or run with --provider reference

colbert.default_model = colbert-ir/colbertv2.0
colbert.requires      = an inference provider registered in slot 'default'
colbert.hint          = register a provider with ProviderSet::add_provider("default", ...) or run with --provider reference

rankllm.default_model = rank-zephyr-7b-v1
rankllm.requires      = a window ranker, or the RERANK_LLM_ENDPOINT environment variable
rankllm.hint          = set RERANK_LLM_ENDPOINT (and RERANK_API_KEY if the endpoint needs it) or register one with ProviderSet::set_window_ranker

api.default_model = rerank-english-v3.0
api.requires      = an API credential
api.hint          = set the RERANK_API_KEY environment variable or pass ApiConfig with a credential via ProviderSet::set_api_config

flashrank.default_model = ms-marco-TinyBERT-L-2-v2
flashrank.requires      = a quantized inference provider registered in slot 'quantized'
flashrank.hint          = register one with ProviderSet::add_provider("quantized", ...); the reference provider supports a quantized mode
)";

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

const Manifest& Manifest::builtin() {
    static const Manifest instance = Manifest::parse(kBuiltinManifest);
    return instance;
}

Manifest Manifest::parse(const std::string& text) {
    std::map<std::string, RankerKind> by_alias;
    for (RankerKind kind : all_ranker_kinds()) {
        by_alias.emplace(kind_alias(kind), kind);
    }

    Manifest manifest;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidRecord("manifest line " + std::to_string(line_no) +
                                ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto dot = key.rfind('.');
        if (dot == std::string::npos) {
            throw InvalidRecord("manifest line " + std::to_string(line_no) +
                                ": key must be '<alias>.<field>'");
        }
        const std::string alias = key.substr(0, dot);
        const std::string field = key.substr(dot + 1);
        const auto kind_it = by_alias.find(alias);
        if (kind_it == by_alias.end()) {
            throw InvalidRecord("manifest line " + std::to_string(line_no) +
                                ": unknown model-type alias '" + alias + "'");
        }
        ManifestEntry& entry = manifest.entries_[kind_it->second];
        if (field == "default_model") {
            entry.default_model = value;
        } else if (field == "requires") {
            entry.requires_text = value;
        } else if (field == "hint") {
            entry.hint = value;
        } else {
            throw InvalidRecord("manifest line " + std::to_string(line_no) +
                                ": unknown field '" + field + "'");
        }
    }

    for (RankerKind kind : all_ranker_kinds()) {
        const auto it = manifest.entries_.find(kind);
        if (it == manifest.entries_.end() || it->second.default_model.empty()) {
            throw InvalidRecord("manifest is missing a default_model for alias '" +
                                kind_alias(kind) + "'");
        }
    }
    return manifest;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidRecord("cannot open manifest file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

const ManifestEntry& Manifest::entry(RankerKind kind) const {
    return entries_.at(kind);
}

}  // namespace rerank
