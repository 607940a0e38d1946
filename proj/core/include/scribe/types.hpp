#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scribe {

// One timestep's output paragraph(s).
class Content {
public:
    Content(std::string text, std::uint64_t timestep);

    const std::string& text() const noexcept { return text_; }
    std::size_t word_count() const noexcept { return word_count_; }
    std::uint64_t timestep() const noexcept { return timestep_; }

    bool operator==(const Content&) const = default;

private:
    std::string text_;
    std::size_t word_count_;
    std::uint64_t timestep_;
};

enum class PlanOrigin { model, human, human_edited };

const char* to_string(PlanOrigin origin) noexcept;
PlanOrigin plan_origin_from_string(std::string_view name);

// Outline for the next paragraph. Text is never empty.
class Plan {
public:
    Plan(std::string text, PlanOrigin origin);

    const std::string& text() const noexcept { return text_; }
    std::size_t sentence_count() const noexcept { return sentence_count_; }
    PlanOrigin origin() const noexcept { return origin_; }

    bool operator==(const Plan&) const = default;

private:
    std::string text_;
    std::size_t sentence_count_;
    PlanOrigin origin_;
};

// Rolling natural-language summary of recent timesteps.
class ShortTermMemory {
public:
    explicit ShortTermMemory(std::string text);

    const std::string& text() const noexcept { return text_; }
    std::size_t sentence_count() const noexcept { return sentence_count_; }

    bool operator==(const ShortTermMemory&) const = default;

private:
    std::string text_;
    std::size_t sentence_count_;
};

enum class Mode { writer, fiction, autonomous };
enum class Perspective { third_person, first_person };

const char* to_string(Mode mode) noexcept;
const char* to_string(Perspective perspective) noexcept;
Mode mode_from_string(std::string_view name);
Perspective perspective_from_string(std::string_view name);

struct SessionMeta {
    std::string title;
    std::string genre;
    std::string background;
    Mode mode = Mode::writer;
    Perspective perspective = Perspective::third_person;
    // When supplied, initialization only asks the model for the opening content.
    std::optional<std::string> initial_short_term;
    std::optional<std::string> initial_plan;

    // Throws Error(invalid_meta) on an empty background or a mode/perspective mismatch.
    void validate() const;

    bool operator==(const SessionMeta&) const = default;
};

struct Range {
    std::size_t min = 0;
    std::size_t max = 0;

    bool operator==(const Range&) const = default;
};

// Soft length limits; violations are reported, never enforced.
struct LengthLimits {
    Range content_words{200, 400};
    Range memory_sentences{10, 20};
    Range plan_sentences{3, 5};

    bool operator==(const LengthLimits&) const = default;
};

enum class ViolationKind { below_minimum, above_maximum };

struct Violation {
    std::string field;
    ViolationKind kind;
    std::size_t actual;
    Range limit;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool operator==(const ValidationReport&) const = default;
};

ValidationReport validate_content(const Content& content, const LengthLimits& limits);
ValidationReport validate_short_term(const ShortTermMemory& memory, const LengthLimits& limits);
ValidationReport validate_plan(const Plan& plan, const LengthLimits& limits);

}  // namespace scribe
