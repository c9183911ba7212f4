// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/llm/chat.hpp"
#include "harness/sandbox/tools.hpp"

namespace harness {

struct BashAction {
    std::string command;
    std::optional<int> timeout_seconds;
    bool operator==(const BashAction&) const = default;
};

struct FinishAction {
    std::string message;
    bool operator==(const FinishAction&) const = default;
};

using ToolAction = std::variant<BashAction, FileEditRequest, FinishAction>;

/// Outcome of validating one call. Exactly one of `action` and `error` is set.
struct CheckedCall {
    ToolCall call;
    std::optional<ToolAction> action;
    std::string error;  // agent-visible description of the defect

    bool ok() const { return action.has_value(); }
};

/// Validates every call of an assistant message against `tools`, keeping
/// request order. Unknown tools, malformed JSON, unexpected or missing
/// arguments, type and enum mismatches, and out-of-range values are errors.
std::vector<CheckedCall> parse_tool_calls(const ChatMessage& message, const std::vector<ToolSpec>& tools,
                                          const ToolSettings& settings = {});

/// Checks `arguments` against one tool's schema. Returns the error text, or
/// nullopt when valid.
std::optional<std::string> validate_arguments(const ToolSpec& tool, const nlohmann::json& arguments);

}  // namespace harness
