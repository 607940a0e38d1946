#include <algorithm>
#include <cmath>
#include <map>

#include "scribe/errors.hpp"
#include "scribe/prompt.hpp"
#include "scribe/text.hpp"

namespace scribe {
namespace {

constexpr std::string_view kRetrievedSlot = "{{retrieved_memory}}";

using Slots = std::map<std::string, std::string, std::less<>>;

// Single pass, so slot values containing "{{" are inserted verbatim.
std::string substitute(std::string_view text, const Slots& slots, TemplateName name) {
    std::string out;
    out.reserve(text.size());
    std::size_t at = 0;
    while (true) {
        const auto open = text.find("{{", at);
        if (open == std::string_view::npos) {
            out.append(text.substr(at));
            return out;
        }
        const auto close = text.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(text.substr(at));
            return out;
        }
        out.append(text.substr(at, open - at));
        const auto slot = text.substr(open + 2, close - open - 2);
        auto it = slots.find(slot);
        if (it == slots.end()) {
            throw Error(ErrorCode::template_slot_missing,
                        std::string("template ") + to_string(name) + " slot {{" + std::string(slot) + "}} is unfilled");
        }
        out.append(it->second);
        at = close + 2;
    }
}

void add_segment(std::vector<PromptMessage>& messages, Role role, PromptSegment segment) {
    if (segment.text.empty()) return;
    if (messages.empty() || messages.back().role != role) messages.push_back({role, {}});
    messages.back().segments.push_back(std::move(segment));
}

std::vector<PromptMessage> render(const PromptTemplate& tmpl, const Slots& slots,
                                  std::span<const ScoredEntry> retrieved) {
    std::vector<PromptMessage> messages;
    for (const auto& section : tmpl.sections()) {
        const auto slot_at = section.text.find(kRetrievedSlot);
        if (slot_at == std::string::npos) {
            add_segment(messages, section.role,
                        {SegmentKind::fixed, substitute(section.text, slots, tmpl.name()), 0.0, 0});
            continue;
        }
        if (retrieved.empty()) continue;
        auto before = std::string(trim(std::string_view(section.text).substr(0, slot_at)));
        auto after = std::string(trim(std::string_view(section.text).substr(slot_at + kRetrievedSlot.size())));
        add_segment(messages, section.role, {SegmentKind::retrieved_frame, std::move(before), 0.0, 0});
        for (const auto& hit : retrieved) {
            add_segment(messages, section.role,
                        {SegmentKind::retrieved_excerpt,
                         "Step " + std::to_string(hit.entry.timestep) + ": " + hit.entry.content_text, hit.similarity,
                         hit.entry.timestep});
        }
        add_segment(messages, section.role, {SegmentKind::retrieved_frame, std::move(after), 0.0, 0});
    }
    return messages;
}

std::string range_text(Range range) {
    return std::to_string(range.min) + " to " + std::to_string(range.max);
}

std::string labeled_format(const OutputSpec& spec, std::string_view paragraph_hint, std::string_view memory_hint,
                           std::string_view plan_hint) {
    std::string out = "Respond using exactly this format, with each label at the start of its own line:";
    if (spec.paragraph) {
        out += "\n\n" + spec.labels.paragraph + ":\n<" + std::string(paragraph_hint) + ">";
    }
    if (spec.memory) {
        out += "\n\n" + spec.labels.memory + ":\n<" + std::string(memory_hint) + ">";
    }
    for (std::size_t i = 1; i <= spec.plans; ++i) {
        out += "\n\n" + spec.labels.plan_prefix + " " + std::to_string(i) + ":\n<" + std::string(plan_hint) + ">";
    }
    return out;
}

std::string plan_count_sentence(std::size_t plans, bool fiction) {
    if (plans == 0) return {};
    const std::string noun = fiction ? (plans == 1 ? "choice" : "choices") : (plans == 1 ? "plan" : "plans");
    return "\n\nWrite exactly " + std::to_string(plans) + " " + noun +
           (plans > 1 ? " and make each one lead the story somewhere different." : ".");
}

PromptBundle finish(TemplateName kind, std::vector<PromptMessage> messages, OutputSpec spec) {
    PromptBundle bundle{kind, std::move(messages), 0, std::move(spec)};
    bundle.token_estimate = estimate_tokens(bundle.messages);
    return bundle;
}

bool first_person(const SessionMeta& meta) {
    return meta.perspective == Perspective::first_person;
}

}  // namespace

std::string PromptMessage::text() const {
    std::string out;
    for (const auto& segment : segments) {
        if (!out.empty()) out += "\n\n";
        out += segment.text;
    }
    return out;
}

std::size_t PromptBundle::excerpt_count() const {
    std::size_t n = 0;
    for (const auto& message : messages) {
        n += static_cast<std::size_t>(std::count_if(message.segments.begin(), message.segments.end(), [](const auto& s) {
            return s.kind == SegmentKind::retrieved_excerpt;
        }));
    }
    return n;
}

std::vector<std::uint64_t> PromptBundle::excerpt_timesteps() const {
    std::vector<std::uint64_t> out;
    for (const auto& message : messages) {
        for (const auto& segment : message.segments) {
            if (segment.kind == SegmentKind::retrieved_excerpt) out.push_back(segment.timestep);
        }
    }
    return out;
}

std::string PromptBundle::flatten() const {
    std::string out;
    for (const auto& message : messages) {
        out += "[";
        out += to_string(message.role);
        out += "]\n";
        out += message.text();
        out += "\n";
    }
    return out;
}

std::size_t PromptConfig::effective_budget() const {
    const double margin = std::clamp(safety_margin, 0.0, 0.99);
    return static_cast<std::size_t>(std::floor(static_cast<double>(context_budget) * (1.0 - margin)));
}

std::size_t estimate_tokens(std::string_view text) {
    std::size_t chars = 0;
    for (char c : text) {
        // Count UTF-8 lead bytes, i.e. code points.
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++chars;
    }
    return (chars + 3) / 4;
}

std::size_t estimate_tokens(std::span<const PromptMessage> messages) {
    std::size_t total = 0;
    for (const auto& message : messages) total += estimate_tokens(message.text());
    return total;
}

PromptBundle build_init_prompt(const SessionMeta& meta, std::size_t plan_count, const PromptConfig& config) {
    meta.validate();
    const bool fiction = first_person(meta);
    OutputSpec spec;
    spec.paragraph = true;
    spec.memory = !meta.initial_short_term.has_value();
    spec.plans = meta.initial_plan ? 0 : plan_count;
    spec.labels = config.labels;

    const auto& limits = config.limits;
    std::string format = labeled_format(
        spec, "the opening passage, " + range_text(limits.content_words) + " words",
        "a short-term memory summarizing the setup and the opening, " + range_text(limits.memory_sentences) +
            " sentences",
        fiction ? "an important choice the main character could make next, " + range_text(limits.plan_sentences) +
                      " sentences written as what I do"
                : "an outline of the next passage, " + range_text(limits.plan_sentences) + " sentences");
    format += plan_count_sentence(spec.plans, fiction);

    Slots slots = {
        {"title", meta.title.empty() ? std::string("(untitled)") : meta.title},
        {"genre", meta.genre.empty() ? std::string("(unspecified)") : meta.genre},
        {"background", meta.background},
        {"perspective", fiction ? "Write in the first person. The reader is the main character, so every passage "
                                  "is told as \"I\" from that character's point of view."
                                : "Write in the third person."},
        {"output_format", std::move(format)},
    };
    const auto& tmpl = config.templates.get(TemplateName::init);
    return finish(TemplateName::init, render(tmpl, slots, {}), std::move(spec));
}

PromptBundle build_generation_prompt(const SessionState& state, std::span<const ScoredEntry> retrieved,
                                     const Plan& chosen, const PromptConfig& config) {
    const bool fiction = first_person(state.meta);
    const auto name = fiction ? TemplateName::generate_fiction : TemplateName::generate_writer;
    OutputSpec spec;
    spec.paragraph = true;
    spec.memory = true;
    spec.plans = state.settings.plan_count;
    spec.labels = config.labels;

    const auto& limits = config.limits;
    std::string format = labeled_format(
        spec, "the next passage, " + range_text(limits.content_words) + " words",
        "the rewritten short-term memory, " + range_text(limits.memory_sentences) + " sentences",
        fiction ? "an important choice the main character could make next, " + range_text(limits.plan_sentences) +
                      " sentences written as what I do"
                : "an outline of the following passage, " + range_text(limits.plan_sentences) + " sentences");
    format += plan_count_sentence(spec.plans, fiction);

    Slots slots = {
        {"short_term_memory", state.short_term.text()},
        {"retrieved_memory", ""},
        {"previous_content", state.last_content().text()},
        {"current_plan", chosen.text()},
        {"output_format", std::move(format)},
    };
    auto bundle = finish(name, render(config.templates.get(name), slots, retrieved), std::move(spec));
    return enforce_budget(std::move(bundle), config.effective_budget());
}

PromptBundle build_selector_prompt(const SessionState& state, std::span<const Plan> plans,
                                   const PromptConfig& config) {
    if (plans.empty()) throw Error(ErrorCode::invalid_argument, "selector prompt needs at least one plan");
    const bool fiction = first_person(state.meta);
    OutputSpec spec;
    spec.choices = plans.size();
    spec.labels = config.labels;

    std::string numbered;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        if (i > 0) numbered += "\n";
        numbered += std::to_string(i + 1) + ". " + plans[i].text();
    }
    std::string format = "Respond using exactly this format, with each label at the start of its own line:\n\n" +
                         spec.labels.chosen + ": <the number of the chosen option, 1 to " +
                         std::to_string(plans.size()) + ">\n\n" + spec.labels.revised +
                         ": <the revised text of the chosen option>";
    Slots slots = {
        {"short_term_memory", state.short_term.text()},
        {"choice_framing", fiction ? "Choices the main character could make next:"
                                   : "Candidate plans for the next passage:"},
        {"plans", std::move(numbered)},
        {"output_format", std::move(format)},
    };
    const auto& tmpl = config.templates.get(TemplateName::select_plan);
    return finish(TemplateName::select_plan, render(tmpl, slots, {}), std::move(spec));
}

PromptBundle enforce_budget(PromptBundle bundle, std::size_t budget) {
    bundle.token_estimate = estimate_tokens(bundle.messages);
    while (bundle.token_estimate > budget) {
        // Locate the lowest-similarity excerpt; among equals, the latest timestep goes first.
        PromptMessage* owner = nullptr;
        std::size_t victim = 0;
        for (auto& message : bundle.messages) {
            for (std::size_t i = 0; i < message.segments.size(); ++i) {
                const auto& s = message.segments[i];
                if (s.kind != SegmentKind::retrieved_excerpt) continue;
                if (owner == nullptr) {
                    owner = &message;
                    victim = i;
                    continue;
                }
                const auto& v = owner->segments[victim];
                if (s.similarity < v.similarity || (s.similarity == v.similarity && s.timestep > v.timestep)) {
                    owner = &message;
                    victim = i;
                }
            }
        }
        if (owner == nullptr) {
            throw Error(ErrorCode::budget_exceeded, "prompt needs " + std::to_string(bundle.token_estimate) +
                                                        " estimated tokens with no retrieved excerpts; budget is " +
                                                        std::to_string(budget));
        }
        owner->segments.erase(owner->segments.begin() + static_cast<std::ptrdiff_t>(victim));
        if (bundle.excerpt_count() == 0) {
            for (auto& message : bundle.messages) {
                std::erase_if(message.segments,
                              [](const PromptSegment& s) { return s.kind == SegmentKind::retrieved_frame; });
            }
            std::erase_if(bundle.messages, [](const PromptMessage& m) { return m.segments.empty(); });
        }
        bundle.token_estimate = estimate_tokens(bundle.messages);
    }
    return bundle;
}

PromptBundle with_repair_instruction(PromptBundle bundle, std::string_view problem) {
    std::string text = "Your previous reply could not be used (" + std::string(problem) + ").";
    if (bundle.output.choices > 0) {
        text += " Reply again using exactly this format:\n\n" + bundle.output.labels.chosen + ": <number>\n\n" +
                bundle.output.labels.revised + ": <text>";
    } else {
        text += " Reply again with every section below, each label at the start of its own line:";
        if (bundle.output.paragraph) text += "\n\n" + bundle.output.labels.paragraph + ":";
        if (bundle.output.memory) text += "\n\n" + bundle.output.labels.memory + ":";
        for (std::size_t i = 1; i <= bundle.output.plans; ++i) {
            text += "\n\n" + bundle.output.labels.plan_prefix + " " + std::to_string(i) + ":";
        }
    }
    bundle.messages.push_back({Role::user, {{SegmentKind::fixed, std::move(text), 0.0, 0}}});
    bundle.token_estimate = estimate_tokens(bundle.messages);
    return bundle;
}

}  // namespace scribe
