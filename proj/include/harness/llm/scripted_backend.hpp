// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/llm/backend.hpp"

namespace harness {

/// One canned assistant turn.
struct ScriptedTurn {
    std::string content;
    std::vector<ToolCall> tool_calls;  // empty ids are filled as call_<turn>_<i>
    TokenUsage usage;

    static ScriptedTurn bash(std::string command);
    static ScriptedTurn finish(std::string message = "done");
    static ScriptedTurn edit(const nlohmann::json& arguments);
    static ScriptedTurn say(std::string text);
};

/// Turns played for episodes matching `instance` ("*" = any) and `attempt`
/// (nullopt = any). The first matching script wins.
struct Script {
    std::string instance = "*";
    std::optional<int> attempt;
    std::vector<ScriptedTurn> turns;
    bool repeat_last = false;  // replay the final turn forever instead of exhausting
};

ScriptedTurn scripted_turn_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScriptedTurn& turn);

/// Plays canned turns. The turn served is selected by the number of assistant
/// messages already in the conversation, so every episode has its own cursor
/// and the backend holds no mutable state.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<Script> scripts, std::string model = "scripted");

    static ScriptedBackend from_json(const nlohmann::json& options);

    Completion complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                        const std::vector<ToolSpec>& tools, const SamplingParams& params) override;
    std::string model_name() const override { return model_; }

private:
    const Script* select(const CallContext& context) const;

    std::vector<Script> scripts_;
    std::string model_;
};

}  // namespace harness
