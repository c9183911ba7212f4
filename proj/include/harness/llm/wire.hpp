// SPDX-License-Identifier: Apache-2.0
#pragma once

// The de-facto chat-completions wire format.

#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/llm/chat.hpp"

namespace harness {

struct Completion {
    ChatMessage message;
    TokenUsage usage;
};

nlohmann::json to_wire_message(const ChatMessage& message);
ChatMessage from_wire_message(const nlohmann::json& message);

nlohmann::json to_wire_tools(const std::vector<ToolSpec>& tools);

/// Request body: model, messages, tools, temperature, max_tokens, stop.
nlohmann::json to_wire_request(std::string_view model, const std::vector<ChatMessage>& messages,
                               const std::vector<ToolSpec>& tools, const SamplingParams& params);

nlohmann::json to_wire_response(std::string_view model, const Completion& completion);

/// Reads choices[0].message and usage. Throws InfraError when the shape is
/// not a chat-completions response.
Completion parse_wire_response(const nlohmann::json& body);

}  // namespace harness
