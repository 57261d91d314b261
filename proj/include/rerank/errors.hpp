#pragma once

#include <exception>
#include <string>
#include <utility>

namespace rerank {

/// Base class for every failure the library reports. `name()` is the stable
/// identifier surfaced by the CLI and the REST service; `detail()` is the
/// human-readable part. A backend tag is attached when an error crosses a
/// Reranker handle so callers can tell which backend raised it.
class Error : public std::exception {
public:
    Error(std::string name, std::string detail)
        : name_(std::move(name)), detail_(std::move(detail)) {
        render();
    }

    const char* what() const noexcept override { return rendered_.c_str(); }

    const std::string& name() const noexcept { return name_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::string& backend_tag() const noexcept { return backend_; }

    void set_backend_tag(const std::string& tag) {
        if (backend_.empty()) {
            backend_ = tag;
            render();
        }
    }

    void append_detail(const std::string& extra) {
        detail_ += extra;
        render();
    }

private:
    void render() {
        rendered_.clear();
        if (!backend_.empty()) {
            rendered_ += "[" + backend_ + "] ";
        }
        rendered_ += name_ + ": " + detail_;
    }

    std::string name_;
    std::string detail_;
    std::string backend_;
    std::string rendered_;
};

#define RERANK_DEFINE_ERROR(NAME)                       \
    class NAME : public Error {                         \
    public:                                             \
        explicit NAME(std::string detail)               \
            : Error(#NAME, std::move(detail)) {}        \
    };

// core
RERANK_DEFINE_ERROR(DuplicateDocId)
RERANK_DEFINE_ERROR(LengthMismatch)
RERANK_DEFINE_ERROR(NotAPermutation)
RERANK_DEFINE_ERROR(UnknownDocId)
RERANK_DEFINE_ERROR(NoScoresAvailable)

// registry
RERANK_DEFINE_ERROR(UnknownModelType)
RERANK_DEFINE_ERROR(CapabilityMissing)
RERANK_DEFINE_ERROR(BackendInitFailure)

// pointwise
RERANK_DEFINE_ERROR(ProviderFailure)
RERANK_DEFINE_ERROR(DimensionMismatch)

// listwise
RERANK_DEFINE_ERROR(UnparseableWindow)
RERANK_DEFINE_ERROR(WindowTransportError)

// apiclient
RERANK_DEFINE_ERROR(AuthError)
RERANK_DEFINE_ERROR(RateLimited)
RERANK_DEFINE_ERROR(MalformedResponse)
RERANK_DEFINE_ERROR(Timeout)

// tooling
RERANK_DEFINE_ERROR(QueryMismatch)
RERANK_DEFINE_ERROR(InvalidRecord)
RERANK_DEFINE_ERROR(MalformedBody)

#undef RERANK_DEFINE_ERROR

}  // namespace rerank
