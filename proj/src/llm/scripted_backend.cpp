// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/scripted_backend.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/util.hpp"

namespace harness {

using nlohmann::json;

ScriptedTurn ScriptedTurn::bash(std::string command) {
    return {{}, {{"", "bash", json{{"command", std::move(command)}}.dump()}}, {}};
}

ScriptedTurn ScriptedTurn::finish(std::string message) {
    return {{}, {{"", std::string(kFinishToolName), json{{"message", std::move(message)}}.dump()}}, {}};
}

ScriptedTurn ScriptedTurn::edit(const json& arguments) { return {{}, {{"", "file_edit", arguments.dump()}}, {}}; }

ScriptedTurn ScriptedTurn::say(std::string text) { return {std::move(text), {}, {}}; }

ScriptedTurn scripted_turn_from_json(const json& j) {
    ScriptedTurn turn;
    turn.content = j.value("content", std::string{});
    if (auto it = j.find("tool_calls"); it != j.end()) {
        for (const auto& c : *it) {
            ToolCall call;
            call.id = c.value("id", std::string{});
            call.name = c.at("name").get<std::string>();
            const json& args = c.contains("arguments") ? c.at("arguments") : json::object();
            call.arguments = args.is_string() ? args.get<std::string>() : args.dump();
            turn.tool_calls.push_back(std::move(call));
        }
    }
    if (auto it = j.find("usage"); it != j.end()) turn.usage = it->get<TokenUsage>();
    return turn;
}

json to_json(const ScriptedTurn& turn) {
    json calls = json::array();
    for (const auto& c : turn.tool_calls) {
        json call{{"name", c.name}, {"arguments", c.arguments}};
        if (!c.id.empty()) call["id"] = c.id;
        calls.push_back(std::move(call));
    }
    return json{{"content", turn.content}, {"tool_calls", calls}, {"usage", turn.usage}};
}

ScriptedBackend::ScriptedBackend(std::vector<Script> scripts, std::string model)
    : scripts_(std::move(scripts)), model_(std::move(model)) {}

ScriptedBackend ScriptedBackend::from_json(const json& options) {
    json opts = options;
    if (auto it = opts.find("script_file"); it != opts.end()) {
        const json content = json::parse(read_file(it->get<std::string>()));
        if (content.is_array()) {
            opts["queue"] = content;
        } else {
            for (auto& [key, value] : content.items()) opts[key] = value;
        }
    }
    std::vector<Script> scripts;
    try {
        if (auto it = opts.find("queue"); it != opts.end()) {
            Script s;
            for (const auto& t : *it) s.turns.push_back(scripted_turn_from_json(t));
            s.repeat_last = opts.value("repeat_last", false);
            scripts.push_back(std::move(s));
        }
        if (auto it = opts.find("scripts"); it != opts.end()) {
            for (const auto& sj : *it) {
                Script s;
                s.instance = sj.value("instance", std::string{"*"});
                if (auto a = sj.find("attempt"); a != sj.end() && !a->is_null()) s.attempt = a->get<int>();
                for (const auto& t : sj.at("turns")) s.turns.push_back(scripted_turn_from_json(t));
                s.repeat_last = sj.value("repeat_last", false);
                scripts.push_back(std::move(s));
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("malformed scripted backend descriptor: {}", e.what()));
    }
    if (!opts.contains("queue") && !opts.contains("scripts")) {
        throw ConfigError("scripted backend needs 'queue', 'scripts' or 'script_file'");
    }
    return ScriptedBackend(std::move(scripts), opts.value("model", std::string{"scripted"}));
}

const Script* ScriptedBackend::select(const CallContext& context) const {
    for (const auto& s : scripts_) {
        const bool instance_ok = s.instance == "*" || s.instance == context.instance_id;
        const bool attempt_ok = !s.attempt || *s.attempt == context.attempt_index;
        if (instance_ok && attempt_ok) return &s;
    }
    return nullptr;
}

Completion ScriptedBackend::complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                                     const std::vector<ToolSpec>& tools, const SamplingParams& params) {
    validate(params);
    const auto turn_index = static_cast<std::size_t>(
        std::count_if(messages.begin(), messages.end(), [](const ChatMessage& m) { return m.role == Role::assistant; }));
    const Script* script = select(context);
    if (script == nullptr || script->turns.empty() || (turn_index >= script->turns.size() && !script->repeat_last)) {
        throw QueueExhausted(fmt::format("scripted queue exhausted for instance '{}' attempt {} at turn {}",
                                         context.instance_id, context.attempt_index, turn_index + 1));
    }
    const ScriptedTurn& turn = script->turns[std::min(turn_index, script->turns.size() - 1)];

    Completion completion;
    completion.usage = turn.usage;
    completion.message = ChatMessage::assistant(turn.content, turn.tool_calls);
    for (std::size_t i = 0; i < completion.message.tool_calls.size(); ++i) {
        auto& call = completion.message.tool_calls[i];
        if (call.id.empty()) call.id = fmt::format("call_{}_{}", turn_index + 1, i + 1);
    }
    if (context.audit) {
        context.audit->record(to_wire_request(model_, messages, tools, params), to_wire_response(model_, completion));
    }
    return completion;
}

}  // namespace harness
