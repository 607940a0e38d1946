#include "scribe/types.hpp"

#include "scribe/errors.hpp"
#include "scribe/text.hpp"

namespace scribe {
namespace {

ValidationReport check_range(std::string field, std::size_t actual, Range limit) {
    ValidationReport report;
    if (actual < limit.min) {
        report.violations.push_back({std::move(field), ViolationKind::below_minimum, actual, limit});
    } else if (actual > limit.max) {
        report.violations.push_back({std::move(field), ViolationKind::above_maximum, actual, limit});
    }
    return report;
}

}  // namespace

Content::Content(std::string text, std::uint64_t timestep)
    : text_(std::move(text)), word_count_(count_words(text_)), timestep_(timestep) {}

Plan::Plan(std::string text, PlanOrigin origin)
    : text_(std::move(text)), sentence_count_(0), origin_(origin) {
    if (is_blank(text_)) throw Error(ErrorCode::invalid_argument, "plan text must not be empty");
    sentence_count_ = count_sentences(text_);
}

ShortTermMemory::ShortTermMemory(std::string text)
    : text_(std::move(text)), sentence_count_(0) {
    if (is_blank(text_)) throw Error(ErrorCode::invalid_argument, "short-term memory must not be empty");
    sentence_count_ = count_sentences(text_);
}

const char* to_string(PlanOrigin origin) noexcept {
    switch (origin) {
        case PlanOrigin::model: return "model";
        case PlanOrigin::human: return "human";
        case PlanOrigin::human_edited: return "human-edited";
    }
    return "model";
}

PlanOrigin plan_origin_from_string(std::string_view name) {
    if (name == "model") return PlanOrigin::model;
    if (name == "human") return PlanOrigin::human;
    if (name == "human-edited") return PlanOrigin::human_edited;
    throw Error(ErrorCode::invalid_argument, "unknown plan origin: " + std::string(name));
}

const char* to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::writer: return "writer";
        case Mode::fiction: return "fiction";
        case Mode::autonomous: return "autonomous";
    }
    return "writer";
}

const char* to_string(Perspective perspective) noexcept {
    return perspective == Perspective::first_person ? "first-person" : "third-person";
}

Mode mode_from_string(std::string_view name) {
    if (name == "writer") return Mode::writer;
    if (name == "fiction") return Mode::fiction;
    if (name == "autonomous") return Mode::autonomous;
    throw Error(ErrorCode::invalid_meta, "unknown mode: " + std::string(name));
}

Perspective perspective_from_string(std::string_view name) {
    if (name == "third-person") return Perspective::third_person;
    if (name == "first-person") return Perspective::first_person;
    throw Error(ErrorCode::invalid_meta, "unknown perspective: " + std::string(name));
}

void SessionMeta::validate() const {
    if (is_blank(background)) throw Error(ErrorCode::invalid_meta, "background must not be empty");
    if (mode == Mode::fiction && perspective != Perspective::first_person) {
        throw Error(ErrorCode::invalid_meta, "fiction mode requires the first-person perspective");
    }
    if (mode == Mode::writer && perspective != Perspective::third_person) {
        throw Error(ErrorCode::invalid_meta, "writer mode requires the third-person perspective");
    }
    if (initial_short_term && is_blank(*initial_short_term)) {
        throw Error(ErrorCode::invalid_meta, "initial short-term memory must not be blank when given");
    }
    if (initial_plan && is_blank(*initial_plan)) {
        throw Error(ErrorCode::invalid_meta, "initial plan must not be blank when given");
    }
}

ValidationReport validate_content(const Content& content, const LengthLimits& limits) {
    return check_range("content.words", content.word_count(), limits.content_words);
}

ValidationReport validate_short_term(const ShortTermMemory& memory, const LengthLimits& limits) {
    return check_range("short_term.sentences", memory.sentence_count(), limits.memory_sentences);
}

ValidationReport validate_plan(const Plan& plan, const LengthLimits& limits) {
    return check_range("plan.sentences", plan.sentence_count(), limits.plan_sentences);
}

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::invalid_meta: return "invalid-meta";
        case ErrorCode::dimension_mismatch: return "dimension-mismatch";
        case ErrorCode::timestep_order: return "timestep-order";
        case ErrorCode::zero_vector: return "zero-vector";
        case ErrorCode::storage_io: return "storage-io";
        case ErrorCode::storage_corrupt: return "storage-corrupt";
        case ErrorCode::template_invalid: return "template-invalid";
        case ErrorCode::template_slot_missing: return "template-slot-missing";
        case ErrorCode::parse_missing_section: return "missing-section";
        case ErrorCode::parse_missing_plans: return "missing-plans";
        case ErrorCode::parse_bad_selection: return "bad-selection";
        case ErrorCode::budget_exceeded: return "budget-exceeded";
        case ErrorCode::empty_input: return "empty-input";
        case ErrorCode::provider_transport: return "provider-transport";
        case ErrorCode::provider_client: return "provider-client";
        case ErrorCode::provider_response: return "provider-response";
        case ErrorCode::invalid_edit: return "invalid-edit";
        case ErrorCode::session_busy: return "session-busy";
        case ErrorCode::session_not_found: return "session-not-found";
        case ErrorCode::persistence_io: return "persistence-io";
        case ErrorCode::persistence_version: return "persistence-version";
        case ErrorCode::persistence_corrupt: return "persistence-corrupt";
        case ErrorCode::persistence_missing_store: return "persistence-missing-store";
        case ErrorCode::injected_fault: return "injected-fault";
    }
    return "unknown";
}

}  // namespace scribe
