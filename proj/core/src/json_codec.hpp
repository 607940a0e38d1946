#pragma once

#include <json.hpp>

#include "scribe/engine.hpp"
#include "scribe/session.hpp"
#include "scribe/types.hpp"

namespace scribe::detail {

using json = nlohmann::json;

json plan_to_json(const Plan& plan);
Plan plan_from_json(const json& doc);

json meta_to_json(const SessionMeta& meta);
SessionMeta meta_from_json(const json& doc);

json report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const json& doc);

json step_output_to_json(const StepOutput& output);
StepOutput step_output_from_json(const json& doc);

json step_record_to_json(const StepRecord& record);
StepRecord step_record_from_json(const json& doc);

json edit_record_to_json(const EditRecord& record);
EditRecord edit_record_from_json(const json& doc);

json settings_to_json(const SessionSettings& settings);
SessionSettings settings_from_json(const json& doc);

}  // namespace scribe::detail
