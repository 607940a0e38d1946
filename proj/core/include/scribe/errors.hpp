#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scribe {

enum class ErrorCode {
    invalid_argument,
    invalid_meta,
    dimension_mismatch,
    timestep_order,
    zero_vector,
    storage_io,
    storage_corrupt,
    template_invalid,
    template_slot_missing,
    parse_missing_section,
    parse_missing_plans,
    parse_bad_selection,
    budget_exceeded,
    empty_input,
    provider_transport,
    provider_client,
    provider_response,
    invalid_edit,
    session_busy,
    session_not_found,
    persistence_io,
    persistence_version,
    persistence_corrupt,
    persistence_missing_store,
    injected_fault,
};

const char* to_string(ErrorCode code) noexcept;

// Base of every error the library throws. Messages never carry credentials.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    virtual bool retryable() const noexcept { return false; }

private:
    ErrorCode code_;
};

// Sections recovered before a parse failed, so callers can inspect or repair.
struct PartialStepOutput {
    std::optional<std::string> paragraph;
    std::optional<std::string> memory;
    std::vector<std::string> plans;
};

class ParseError : public Error {
public:
    ParseError(ErrorCode code, const std::string& message, PartialStepOutput partial = {})
        : Error(code, message), partial_(std::move(partial)) {}

    const PartialStepOutput& partial() const noexcept { return partial_; }

private:
    PartialStepOutput partial_;
};

class ProviderError : public Error {
public:
    ProviderError(ErrorCode code, const std::string& message, bool retryable, int http_status = 0)
        : Error(code, message), retryable_(retryable), http_status_(http_status) {}

    bool retryable() const noexcept override { return retryable_; }
    int http_status() const noexcept { return http_status_; }

private:
    bool retryable_;
    int http_status_;
};

}  // namespace scribe
