#include <cctype>
#include <map>
#include <optional>

#include "scribe/errors.hpp"
#include "scribe/prompt.hpp"
#include "scribe/text.hpp"

namespace scribe {
namespace {

enum class LabelKind { paragraph, memory, plan, chosen, revised };

struct LabelHit {
    LabelKind kind;
    std::size_t plan_number = 0;
    std::size_t line_begin = 0;
    std::size_t content_begin = 0;
};

struct Sections {
    std::optional<std::string> paragraph;
    std::optional<std::string> memory;
    std::map<std::size_t, std::string> plans;
    std::optional<std::string> chosen;
    std::optional<std::string> revised;
};

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r';
}

// Skips horizontal whitespace and markdown decoration ('*', '#').
std::size_t skip_decoration(std::string_view line, std::size_t at) {
    while (at < line.size() && (is_space(line[at]) || line[at] == '*' || line[at] == '#')) ++at;
    return at;
}

// Matches `label` case-insensitively at `at`; returns the index past it.
std::optional<std::size_t> match_word(std::string_view line, std::size_t at, std::string_view label) {
    if (label.empty() || line.size() - at < label.size()) return std::nullopt;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (lower(line[at + i]) != lower(label[i])) return std::nullopt;
    }
    return at + label.size();
}

// Expects optional spaces, ':', then decoration. Returns the offset of the content.
std::optional<std::size_t> match_colon(std::string_view line, std::size_t at) {
    while (at < line.size() && is_space(line[at])) ++at;
    if (at >= line.size() || line[at] != ':') return std::nullopt;
    ++at;
    while (at < line.size() && line[at] == '*') ++at;
    return at;
}

std::optional<LabelHit> match_label(std::string_view line, const SectionLabels& labels) {
    const std::size_t start = skip_decoration(line, 0);
    const std::pair<LabelKind, const std::string*> simple[] = {
        {LabelKind::paragraph, &labels.paragraph},
        {LabelKind::memory, &labels.memory},
        {LabelKind::chosen, &labels.chosen},
        {LabelKind::revised, &labels.revised},
    };
    for (const auto& [kind, label] : simple) {
        auto end = match_word(line, start, *label);
        if (!end) continue;
        std::size_t at = *end;
        while (at < line.size() && line[at] == '*') ++at;
        if (auto content = match_colon(line, at)) return LabelHit{kind, 0, 0, *content};
    }
    if (auto end = match_word(line, start, labels.plan_prefix)) {
        std::size_t at = *end;
        while (at < line.size() && is_space(line[at])) ++at;
        std::size_t number = 0;
        std::size_t digits = 0;
        while (at < line.size() && std::isdigit(static_cast<unsigned char>(line[at])) && digits < 7) {
            number = number * 10 + static_cast<std::size_t>(line[at] - '0');
            ++at;
            ++digits;
        }
        if (digits == 0 || digits == 7) return std::nullopt;
        while (at < line.size() && line[at] == '*') ++at;
        if (auto content = match_colon(line, at)) return LabelHit{LabelKind::plan, number, 0, *content};
    }
    return std::nullopt;
}

Sections scan(std::string_view raw, const SectionLabels& labels) {
    std::vector<LabelHit> hits;
    std::size_t line_begin = 0;
    while (line_begin <= raw.size()) {
        auto nl = raw.find('\n', line_begin);
        const std::size_t line_end = nl == std::string_view::npos ? raw.size() : nl;
        if (auto hit = match_label(raw.substr(line_begin, line_end - line_begin), labels)) {
            hit->line_begin = line_begin;
            hit->content_begin += line_begin;
            hits.push_back(*hit);
        }
        if (nl == std::string_view::npos) break;
        line_begin = nl + 1;
    }

    Sections sections;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        const auto& hit = hits[i];
        const std::size_t end = i + 1 < hits.size() ? hits[i + 1].line_begin : raw.size();
        std::string text(trim(raw.substr(hit.content_begin, end - hit.content_begin)));
        auto keep_first = [&](std::optional<std::string>& slot) {
            if (!slot) slot = std::move(text);
        };
        switch (hit.kind) {
            case LabelKind::paragraph: keep_first(sections.paragraph); break;
            case LabelKind::memory: keep_first(sections.memory); break;
            case LabelKind::chosen: keep_first(sections.chosen); break;
            case LabelKind::revised: keep_first(sections.revised); break;
            case LabelKind::plan: sections.plans.try_emplace(hit.plan_number, std::move(text)); break;
        }
    }
    return sections;
}

PartialStepOutput partial_of(const Sections& sections, std::size_t expected_plans) {
    PartialStepOutput partial;
    if (sections.paragraph && !sections.paragraph->empty()) partial.paragraph = sections.paragraph;
    if (sections.memory && !sections.memory->empty()) partial.memory = sections.memory;
    for (std::size_t i = 1; i <= expected_plans; ++i) {
        auto it = sections.plans.find(i);
        if (it == sections.plans.end() || it->second.empty()) break;
        partial.plans.push_back(it->second);
    }
    return partial;
}

std::vector<Plan> take_plans(const Sections& sections, std::size_t expected, const SectionLabels& labels) {
    std::vector<Plan> plans;
    plans.reserve(expected);
    for (std::size_t i = 1; i <= expected; ++i) {
        auto it = sections.plans.find(i);
        if (it == sections.plans.end() || it->second.empty()) {
            throw ParseError(ErrorCode::parse_missing_plans,
                             "expected " + std::to_string(expected) + " plans but '" + labels.plan_prefix + " " +
                                 std::to_string(i) + ":' is missing or empty",
                             partial_of(sections, expected));
        }
        plans.emplace_back(it->second, PlanOrigin::model);
    }
    return plans;
}

[[noreturn]] void missing_section(const std::string& label, const Sections& sections, std::size_t expected_plans) {
    throw ParseError(ErrorCode::parse_missing_section, "response has no '" + label + ":' section",
                     partial_of(sections, expected_plans));
}

}  // namespace

StepOutput parse_step_output(std::string_view raw, std::size_t expected_plans, std::uint64_t prev_step,
                             const SectionLabels& labels) {
    const auto sections = scan(raw, labels);
    if (!sections.paragraph || sections.paragraph->empty()) missing_section(labels.paragraph, sections, expected_plans);
    if (!sections.memory || sections.memory->empty()) missing_section(labels.memory, sections, expected_plans);
    auto plans = take_plans(sections, expected_plans, labels);
    return StepOutput{Content(*sections.paragraph, prev_step + 1), ShortTermMemory(*sections.memory), std::move(plans)};
}

InitOutput parse_init_output(std::string_view raw, const OutputSpec& spec) {
    const auto sections = scan(raw, spec.labels);
    if (!sections.paragraph || sections.paragraph->empty()) missing_section(spec.labels.paragraph, sections, spec.plans);
    std::optional<ShortTermMemory> memory;
    if (spec.memory) {
        if (!sections.memory || sections.memory->empty()) missing_section(spec.labels.memory, sections, spec.plans);
        memory.emplace(*sections.memory);
    }
    auto plans = take_plans(sections, spec.plans, spec.labels);
    return InitOutput{Content(*sections.paragraph, 0), std::move(memory), std::move(plans)};
}

std::string render_step_output(const StepOutput& output, const SectionLabels& labels) {
    std::string out = labels.paragraph + ":\n" + output.content.text() + "\n\n" + labels.memory + ":\n" +
                      output.short_term.text();
    for (std::size_t i = 0; i < output.plans.size(); ++i) {
        out += "\n\n" + labels.plan_prefix + " " + std::to_string(i + 1) + ":\n" + output.plans[i].text();
    }
    out += "\n";
    return out;
}

Selection parse_selector_output(std::string_view raw, std::span<const Plan> plans, const SectionLabels& labels) {
    if (plans.empty()) throw Error(ErrorCode::invalid_argument, "no plans to select from");
    const auto sections = scan(raw, labels);
    if (!sections.chosen) {
        throw ParseError(ErrorCode::parse_bad_selection, "response has no '" + labels.chosen + ":' line");
    }
    const std::string& chosen = *sections.chosen;
    std::size_t at = 0;
    while (at < chosen.size() && !std::isdigit(static_cast<unsigned char>(chosen[at])) && chosen[at] != '\n') ++at;
    std::size_t index = 0;
    std::size_t digits = 0;
    while (at < chosen.size() && std::isdigit(static_cast<unsigned char>(chosen[at])) && digits < 7) {
        index = index * 10 + static_cast<std::size_t>(chosen[at] - '0');
        ++at;
        ++digits;
    }
    if (digits == 0 || digits == 7) {
        throw ParseError(ErrorCode::parse_bad_selection, "chosen plan is not a number");
    }
    if (index < 1 || index > plans.size()) {
        throw ParseError(ErrorCode::parse_bad_selection, "chosen plan " + std::to_string(index) + " is outside 1.." +
                                                             std::to_string(plans.size()));
    }
    const bool revised = sections.revised && !sections.revised->empty();
    return Selection{index, Plan(revised ? *sections.revised : plans[index - 1].text(), PlanOrigin::model)};
}

}  // namespace scribe
