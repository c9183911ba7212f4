// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/chat.hpp"

#include <fmt/format.h>

#include "harness/core/errors.hpp"

namespace harness {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
        case Role::tool: return "tool";
    }
    return "user";
}

Role role_from_string(std::string_view text) {
    if (text == "system") return Role::system;
    if (text == "user") return Role::user;
    if (text == "assistant") return Role::assistant;
    if (text == "tool") return Role::tool;
    throw ValidationError(fmt::format("unknown chat role '{}'", text));
}

void validate(const SamplingParams& params) {
    if (!is_valid_temperature(params.temperature)) {
        throw ConfigError(fmt::format("temperature {} outside [0, 2]", params.temperature));
    }
    if (params.max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
}

std::string_view to_string(ParamType type) {
    switch (type) {
        case ParamType::string: return "string";
        case ParamType::integer: return "integer";
        case ParamType::boolean: return "boolean";
    }
    return "string";
}

const ToolParam* ToolSpec::find(std::string_view param) const {
    for (const auto& p : parameters) {
        if (p.name == param) return &p;
    }
    return nullptr;
}

nlohmann::json ToolSpec::parameters_schema() const {
    nlohmann::json properties = nlohmann::json::object();
    nlohmann::json required = nlohmann::json::array();
    for (const auto& p : parameters) {
        nlohmann::json prop{{"type", to_string(p.type)}, {"description", p.description}};
        if (!p.allowed_values.empty()) prop["enum"] = p.allowed_values;
        properties[p.name] = std::move(prop);
        if (p.required) required.push_back(p.name);
    }
    return nlohmann::json{{"type", "object"}, {"properties", properties}, {"required", required}};
}

std::vector<ChatMessage> messages_from_events(const std::vector<Event>& events) {
    std::vector<ChatMessage> messages;
    int open_turn = -1;
    std::size_t assistant_at = 0;

    auto assistant_for = [&](const Event& e) -> ChatMessage& {
        if (e.turn != open_turn) {
            messages.push_back(ChatMessage::assistant(""));
            assistant_at = messages.size() - 1;
            open_turn = e.turn;
        }
        return messages[assistant_at];
    };

    for (const auto& e : events) {
        switch (e.kind) {
            case EventKind::system_prompt:
                messages.push_back(ChatMessage::system(std::get<TextPayload>(e.payload).text));
                break;
            case EventKind::user_task:
                messages.push_back(ChatMessage::user(std::get<TextPayload>(e.payload).text));
                break;
            case EventKind::assistant_message:
                assistant_for(e).content = std::get<TextPayload>(e.payload).text;
                break;
            case EventKind::tool_call: {
                const auto& call = std::get<ToolCallPayload>(e.payload);
                assistant_for(e).tool_calls.push_back({call.call_id, call.name, call.arguments});
                break;
            }
            case EventKind::finish: {
                const auto& call = std::get<FinishPayload>(e.payload);
                assistant_for(e).tool_calls.push_back({call.call_id, std::string(kFinishToolName), call.arguments});
                break;
            }
            case EventKind::tool_observation: {
                const auto& obs = std::get<ObservationPayload>(e.payload);
                messages.push_back(ChatMessage::tool(obs.call_id, obs.content));
                break;
            }
            case EventKind::error:
                break;
        }
    }
    return messages;
}

}  // namespace harness
