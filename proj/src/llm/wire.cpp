// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/wire.hpp"

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"

namespace harness {

using nlohmann::json;

json to_wire_message(const ChatMessage& m) {
    json j{{"role", to_string(m.role)}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
        json calls = json::array();
        for (const auto& c : m.tool_calls) {
            calls.push_back({{"id", c.id}, {"type", "function"}, {"function", {{"name", c.name}, {"arguments", c.arguments}}}});
        }
        j["tool_calls"] = std::move(calls);
    }
    if (m.role == Role::tool) j["tool_call_id"] = m.tool_call_id;
    return j;
}

ChatMessage from_wire_message(const json& j) {
    ChatMessage m;
    m.role = role_from_string(j.value("role", std::string{"assistant"}));
    if (auto it = j.find("content"); it != j.end() && it->is_string()) m.content = it->get<std::string>();
    if (auto it = j.find("tool_calls"); it != j.end() && it->is_array()) {
        for (const auto& c : *it) {
            ToolCall call;
            call.id = c.value("id", std::string{});
            const json& fn = c.at("function");
            call.name = fn.value("name", std::string{});
            const json& args = fn.contains("arguments") ? fn.at("arguments") : json();
            call.arguments = args.is_string() ? args.get<std::string>() : args.is_null() ? "{}" : args.dump();
            m.tool_calls.push_back(std::move(call));
        }
    }
    if (auto it = j.find("tool_call_id"); it != j.end() && it->is_string()) m.tool_call_id = it->get<std::string>();
    return m;
}

json to_wire_tools(const std::vector<ToolSpec>& tools) {
    json out = json::array();
    for (const auto& t : tools) {
        out.push_back({{"type", "function"},
                       {"function", {{"name", t.name}, {"description", t.description}, {"parameters", t.parameters_schema()}}}});
    }
    return out;
}

json to_wire_request(std::string_view model, const std::vector<ChatMessage>& messages,
                     const std::vector<ToolSpec>& tools, const SamplingParams& params) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back(to_wire_message(m));
    json body{{"model", model}, {"messages", std::move(msgs)}, {"temperature", params.temperature},
              {"max_tokens", params.max_output_tokens}};
    if (!tools.empty()) body["tools"] = to_wire_tools(tools);
    if (!params.stop_sequences.empty()) body["stop"] = params.stop_sequences;
    return body;
}

json to_wire_response(std::string_view model, const Completion& completion) {
    return json{{"object", "chat.completion"},
                {"model", model},
                {"choices", json::array({{{"index", 0},
                                          {"message", to_wire_message(completion.message)},
                                          {"finish_reason", completion.message.tool_calls.empty() ? "stop" : "tool_calls"}}})},
                {"usage", completion.usage}};
}

Completion parse_wire_response(const json& body) {
    try {
        const json& choices = body.at("choices");
        if (!choices.is_array() || choices.empty()) throw InfraError("chat-completions response has no choices");
        Completion c;
        c.message = from_wire_message(choices.at(0).at("message"));
        c.message.role = Role::assistant;
        if (auto it = body.find("usage"); it != body.end() && it->is_object()) c.usage = it->get<TokenUsage>();
        return c;
    } catch (const json::exception& e) {
        throw InfraError(fmt::format("malformed chat-completions response: {}", e.what()));
    }
}

}  // namespace harness
