#include "json_codec.hpp"

namespace scribe::detail {
namespace {

std::optional<std::string> optional_string(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    return doc.at(key).get<std::string>();
}

}  // namespace

json plan_to_json(const Plan& plan) {
    return {{"text", plan.text()}, {"origin", to_string(plan.origin())}};
}

Plan plan_from_json(const json& doc) {
    return Plan(doc.at("text").get<std::string>(), plan_origin_from_string(doc.at("origin").get<std::string>()));
}

json meta_to_json(const SessionMeta& meta) {
    json doc = {{"title", meta.title},
                {"genre", meta.genre},
                {"background", meta.background},
                {"mode", to_string(meta.mode)},
                {"perspective", to_string(meta.perspective)}};
    doc["initial_short_term"] = meta.initial_short_term ? json(*meta.initial_short_term) : json();
    doc["initial_plan"] = meta.initial_plan ? json(*meta.initial_plan) : json();
    return doc;
}

SessionMeta meta_from_json(const json& doc) {
    SessionMeta meta;
    meta.title = doc.value("title", std::string());
    meta.genre = doc.value("genre", std::string());
    meta.background = doc.at("background").get<std::string>();
    meta.mode = mode_from_string(doc.at("mode").get<std::string>());
    meta.perspective = perspective_from_string(doc.at("perspective").get<std::string>());
    meta.initial_short_term = optional_string(doc, "initial_short_term");
    meta.initial_plan = optional_string(doc, "initial_plan");
    return meta;
}

json report_to_json(const ValidationReport& report) {
    json out = json::array();
    for (const auto& v : report.violations) {
        out.push_back({{"field", v.field},
                       {"kind", v.kind == ViolationKind::below_minimum ? "below-minimum" : "above-maximum"},
                       {"actual", v.actual},
                       {"min", v.limit.min},
                       {"max", v.limit.max}});
    }
    return out;
}

ValidationReport report_from_json(const json& doc) {
    ValidationReport report;
    for (const auto& v : doc) {
        const auto kind = v.at("kind").get<std::string>();
        if (kind != "below-minimum" && kind != "above-maximum") throw std::invalid_argument("unknown violation kind");
        report.violations.push_back(Violation{
            v.at("field").get<std::string>(),
            kind == "below-minimum" ? ViolationKind::below_minimum : ViolationKind::above_maximum,
            v.at("actual").get<std::size_t>(),
            Range{v.at("min").get<std::size_t>(), v.at("max").get<std::size_t>()},
        });
    }
    return report;
}

json step_output_to_json(const StepOutput& output) {
    json plans = json::array();
    for (const auto& plan : output.plans) plans.push_back(plan_to_json(plan));
    return {{"content", {{"timestep", output.content.timestep()}, {"text", output.content.text()}}},
            {"short_term", output.short_term.text()},
            {"plans", std::move(plans)}};
}

StepOutput step_output_from_json(const json& doc) {
    std::vector<Plan> plans;
    for (const auto& plan : doc.at("plans")) plans.push_back(plan_from_json(plan));
    const auto& content = doc.at("content");
    return StepOutput{Content(content.at("text").get<std::string>(), content.at("timestep").get<std::uint64_t>()),
                      ShortTermMemory(doc.at("short_term").get<std::string>()), std::move(plans)};
}

json step_record_to_json(const StepRecord& record) {
    return {{"step", record.step},
            {"chosen_plan", plan_to_json(record.chosen_plan)},
            {"retrieved_timesteps", record.retrieved_timesteps},
            {"prompt_tokens", record.prompt_tokens},
            {"consumed_content_timestep", record.consumed_content_timestep},
            {"consumed_short_term", record.consumed_short_term},
            {"memory_size_before", record.memory_size_before},
            {"memory_size_after", record.memory_size_after},
            {"output", step_output_to_json(record.output)},
            {"validation", report_to_json(record.validation)},
            {"repaired", record.repaired}};
}

StepRecord step_record_from_json(const json& doc) {
    return StepRecord{
        doc.at("step").get<std::uint64_t>(),
        plan_from_json(doc.at("chosen_plan")),
        doc.at("retrieved_timesteps").get<std::vector<std::uint64_t>>(),
        doc.at("prompt_tokens").get<std::size_t>(),
        doc.at("consumed_content_timestep").get<std::uint64_t>(),
        doc.at("consumed_short_term").get<std::string>(),
        doc.at("memory_size_before").get<std::size_t>(),
        doc.at("memory_size_after").get<std::size_t>(),
        step_output_from_json(doc.at("output")),
        report_from_json(doc.at("validation")),
        doc.at("repaired").get<bool>(),
        {},
    };
}

json edit_record_to_json(const EditRecord& record) {
    return {{"step", record.step},
            {"op", to_string(record.kind)},
            {"index", record.index ? json(*record.index) : json()},
            {"previous_text", record.previous_text},
            {"new_text", record.new_text}};
}

EditRecord edit_record_from_json(const json& doc) {
    EditRecord record;
    record.step = doc.at("step").get<std::uint64_t>();
    record.kind = edit_kind_from_string(doc.at("op").get<std::string>());
    if (doc.contains("index") && !doc.at("index").is_null()) record.index = doc.at("index").get<std::size_t>();
    record.previous_text = doc.at("previous_text").get<std::string>();
    record.new_text = doc.at("new_text").get<std::string>();
    return record;
}

json settings_to_json(const SessionSettings& settings) {
    return {{"plan_count", settings.plan_count}, {"retrieval_k", settings.retrieval_k}};
}

SessionSettings settings_from_json(const json& doc) {
    return SessionSettings{doc.at("plan_count").get<std::size_t>(), doc.at("retrieval_k").get<std::size_t>()};
}

}  // namespace scribe::detail
