#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/memory.hpp"
#include "scribe/session.hpp"
#include "scribe/types.hpp"

namespace scribe {

enum class TemplateName { init, generate_writer, generate_fiction, select_plan };

const char* to_string(TemplateName name) noexcept;

enum class Role { system, user };

const char* to_string(Role role) noexcept;

struct TemplateSection {
    Role role = Role::user;
    std::string label;
    std::string text;
};

// A versioned prompt template. Source format:
//
//   # scribe-template <name> v<version>
//   [system]
//   ...text with {{slot}} placeholders...
//   [user:<label>]
//   ...
//
// Consecutive sections with the same role form one message. A section
// containing {{retrieved_memory}} is dropped entirely when nothing was retrieved.
class PromptTemplate {
public:
    static PromptTemplate parse(std::string_view source);

    TemplateName name() const noexcept { return name_; }
    int version() const noexcept { return version_; }
    const std::vector<TemplateSection>& sections() const noexcept { return sections_; }
    const std::set<std::string>& placeholders() const noexcept { return placeholders_; }

private:
    TemplateName name_ = TemplateName::init;
    int version_ = 0;
    std::vector<TemplateSection> sections_;
    std::set<std::string> placeholders_;
};

// The four templates a session renders with. Defaults are compiled in from
// core/templates/*.tmpl; a directory of overrides may replace any of them.
class TemplateSet {
public:
    static TemplateSet defaults();

    // Loads <dir>/<name>.tmpl for every template name present in `dir`.
    void load_overrides(const std::filesystem::path& dir);
    void set(PromptTemplate tmpl);
    const PromptTemplate& get(TemplateName name) const;

private:
    std::map<TemplateName, PromptTemplate> templates_;
};

// Labels of the plain-text response format. The parser is keyed on these.
struct SectionLabels {
    std::string paragraph = "Output Paragraph";
    std::string memory = "Output Memory";
    std::string plan_prefix = "Output Plan";
    std::string chosen = "Chosen Plan";
    std::string revised = "Revised Plan";
};

// What a rendered prompt asks the model to produce.
struct OutputSpec {
    bool paragraph = false;
    bool memory = false;
    std::size_t plans = 0;
    // Selector prompts ask for "Chosen Plan"/"Revised Plan" over `choices` options.
    std::size_t choices = 0;
    SectionLabels labels;
};

enum class SegmentKind { fixed, retrieved_frame, retrieved_excerpt };

struct PromptSegment {
    SegmentKind kind = SegmentKind::fixed;
    std::string text;
    double similarity = 0.0;
    std::uint64_t timestep = 0;
};

struct PromptMessage {
    Role role = Role::user;
    std::vector<PromptSegment> segments;

    // Segments joined by blank lines.
    std::string text() const;
};

struct PromptBundle {
    TemplateName kind = TemplateName::init;
    std::vector<PromptMessage> messages;
    std::size_t token_estimate = 0;
    OutputSpec output;

    std::size_t excerpt_count() const;
    std::vector<std::uint64_t> excerpt_timesteps() const;
    // Every message text, each prefixed by its role; stable across runs.
    std::string flatten() const;
};

struct PromptConfig {
    TemplateSet templates = TemplateSet::defaults();
    SectionLabels labels;
    LengthLimits limits;
    std::size_t context_budget = 3000;
    // Fraction of the budget held back for repair instructions and estimate error.
    double safety_margin = 0.15;

    std::size_t effective_budget() const;
};

// ceil(characters / 4).
std::size_t estimate_tokens(std::string_view text);
// Sum of per-message estimates.
std::size_t estimate_tokens(std::span<const PromptMessage> messages);

PromptBundle build_init_prompt(const SessionMeta& meta, std::size_t plan_count, const PromptConfig& config);

// Retrieved entries are rendered in the given order, each prefixed with its
// timestep. The result is already passed through enforce_budget.
PromptBundle build_generation_prompt(const SessionState& state, std::span<const ScoredEntry> retrieved,
                                     const Plan& chosen, const PromptConfig& config);

PromptBundle build_selector_prompt(const SessionState& state, std::span<const Plan> plans,
                                   const PromptConfig& config);

// Drops retrieved excerpts, lowest similarity first, until the estimate fits.
// Throws Error(budget_exceeded) if the fixed sections alone do not fit.
PromptBundle enforce_budget(PromptBundle bundle, std::size_t budget);

// Appends a user message restating the required format after a parse failure.
PromptBundle with_repair_instruction(PromptBundle bundle, std::string_view problem);

struct StepOutput {
    Content content;
    ShortTermMemory short_term;
    std::vector<Plan> plans;

    bool operator==(const StepOutput&) const = default;
};

struct InitOutput {
    Content content;
    std::optional<ShortTermMemory> short_term;
    std::vector<Plan> plans;
};

// Sections are found by label at the start of a line, case-insensitively,
// followed by ':'; each runs to the next label or the end of the text. The
// first occurrence of a label wins. Throws ParseError.
StepOutput parse_step_output(std::string_view raw, std::size_t expected_plans, std::uint64_t prev_step,
                             const SectionLabels& labels = {});

InitOutput parse_init_output(std::string_view raw, const OutputSpec& spec);

// Canonical labeled form; parse_step_output inverts it exactly.
std::string render_step_output(const StepOutput& output, const SectionLabels& labels = {});

struct Selection {
    std::size_t index = 0;  // 1-based
    Plan plan;
};

// Expects "Chosen Plan: <1..n>" and "Revised Plan: <text>". An empty revision
// falls back to the chosen plan's text. The returned plan has origin model.
Selection parse_selector_output(std::string_view raw, std::span<const Plan> plans, const SectionLabels& labels = {});

}  // namespace scribe
