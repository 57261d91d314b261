#pragma once

#include <map>
#include <string>

#include "rerank/kinds.hpp"

namespace rerank {

/// Per-kind manifest entry: the default model and the capability requirement
/// text used to compose CapabilityMissing messages.
struct ManifestEntry {
    std::string default_model;
    std::string requires_text;
    std::string hint;

    bool operator==(const ManifestEntry&) const = default;
};

/// The one dispatch point for model-kind metadata: the alias table, default
/// models and capability requirement descriptions. A copy ships as a text
/// file (share/rerank.manifest) and an identical table is compiled in.
class Manifest {
public:
    /// Compiled-in manifest, identical to the shipped file.
    static const Manifest& builtin();

    /// Parses the key-value manifest format:
    ///   <alias>.default_model = <model ref>
    ///   <alias>.requires      = <requirement description>
    ///   <alias>.hint          = <remediation hint>
    /// '#' starts a comment. All six aliases must be present with a
    /// non-empty default_model. Throws InvalidRecord on violations.
    static Manifest parse(const std::string& text);
    static Manifest load(const std::string& path);

    const ManifestEntry& entry(RankerKind kind) const;

    bool operator==(const Manifest&) const = default;

private:
    std::map<RankerKind, ManifestEntry> entries_;
};

}  // namespace rerank
