// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"

namespace harness {

enum class Role { system, user, assistant, tool };
std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

inline constexpr std::string_view kFinishToolName = "finish";

/// One function call requested by the model. `arguments` is kept as the raw
/// JSON text the backend produced so malformed calls can be reported back.
struct ToolCall {
    std::string id;
    std::string name;
    std::string arguments;

    bool operator==(const ToolCall&) const = default;
};

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    std::vector<ToolCall> tool_calls;  // assistant only
    std::string tool_call_id;          // set iff role == tool

    static ChatMessage system(std::string text) { return {Role::system, std::move(text), {}, {}}; }
    static ChatMessage user(std::string text) { return {Role::user, std::move(text), {}, {}}; }
    static ChatMessage assistant(std::string text, std::vector<ToolCall> calls = {}) {
        return {Role::assistant, std::move(text), std::move(calls), {}};
    }
    static ChatMessage tool(std::string call_id, std::string text) {
        return {Role::tool, std::move(text), {}, std::move(call_id)};
    }

    bool operator==(const ChatMessage&) const = default;
};

struct SamplingParams {
    double temperature = 0.0;
    int max_output_tokens = 4096;
    std::vector<std::string> stop_sequences;
};

/// Throws ConfigError when temperature is outside [0, 2] or the token cap < 1.
void validate(const SamplingParams& params);

enum class ParamType { string, integer, boolean };
std::string_view to_string(ParamType type);

struct ToolParam {
    std::string name;
    ParamType type = ParamType::string;
    std::string description;
    bool required = false;
    std::vector<std::string> allowed_values;  // string enum; empty = unconstrained
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ToolParam> parameters;

    const ToolParam* find(std::string_view param) const;
    /// JSON-schema object for the `parameters` field of a function tool.
    nlohmann::json parameters_schema() const;
};

/// Rebuilds the chat transcript an agent loop produced from its event
/// stream. The loop itself builds its requests through this function, which
/// is what makes replay comparisons exact.
std::vector<ChatMessage> messages_from_events(const std::vector<Event>& events);

}  // namespace harness
