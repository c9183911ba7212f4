// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON mappings for the core domain types. Field names are the on-disk
// schema for suite files, event logs and attempt summaries.

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"

namespace harness {

void to_json(nlohmann::json& j, const TokenUsage& u);
void from_json(const nlohmann::json& j, TokenUsage& u);

void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);

void to_json(nlohmann::json& j, const TestResult& t);
void from_json(const nlohmann::json& j, TestResult& t);

void to_json(nlohmann::json& j, const VerificationResult& v);
void from_json(const nlohmann::json& j, VerificationResult& v);

/// Suite-file record. Unknown keys are ignored; missing optional keys take
/// their defaults.
TaskInstance task_instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TaskInstance& instance);

/// Attempt summary: everything except the event stream.
nlohmann::json attempt_summary_to_json(const AttemptRecord& record);
AttemptRecord attempt_summary_from_json(const nlohmann::json& j);

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

}  // namespace harness
