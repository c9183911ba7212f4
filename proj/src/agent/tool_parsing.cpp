// SPDX-License-Identifier: Apache-2.0
#include "harness/agent/tool_parsing.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "harness/agent/prompt.hpp"

namespace harness {

namespace {

using json = nlohmann::json;

bool type_matches(ParamType type, const json& value) {
    switch (type) {
        case ParamType::string: return value.is_string();
        case ParamType::integer: return value.is_number_integer();
        case ParamType::boolean: return value.is_boolean();
    }
    return false;
}

const char* article(ParamType type) { return type == ParamType::integer ? "an" : "a"; }

std::optional<std::string> require(const json& args, std::string_view tool, std::string_view action,
                                   std::initializer_list<std::string_view> names) {
    for (auto name : names) {
        if (!args.contains(name)) {
            return fmt::format("missing required argument '{}' for tool {} with action {}", name, tool, action);
        }
    }
    return std::nullopt;
}

std::string string_arg(const json& args, const char* name) {
    auto it = args.find(name);
    return it == args.end() ? std::string() : it->get<std::string>();
}

std::variant<ToolAction, std::string> build_action(const std::string& name, const json& args,
                                                   const ToolSettings& settings) {
    if (name == kBashToolName) {
        BashAction bash{args.at("command").get<std::string>(), std::nullopt};
        if (args.contains("timeout")) {
            const auto t = args.at("timeout").get<std::int64_t>();
            if (t < 1 || t > settings.max_bash_timeout) {
                return fmt::format("argument 'timeout' of tool bash must be between 1 and {}", settings.max_bash_timeout);
            }
            bash.timeout_seconds = static_cast<int>(t);
        }
        return ToolAction{bash};
    }
    if (name == kFinishToolName) return ToolAction{FinishAction{string_arg(args, "message")}};

    FileEditRequest req;
    const std::string action = args.at("action").get<std::string>();
    req.action = *edit_action_from_string(action);
    req.path = args.at("path").get<std::string>();
    std::optional<std::string> missing;
    switch (req.action) {
        case EditAction::view: break;
        case EditAction::create: missing = require(args, name, action, {"file_text"}); break;
        case EditAction::str_replace: missing = require(args, name, action, {"old_str"}); break;
        case EditAction::insert: missing = require(args, name, action, {"insert_line", "new_str"}); break;
    }
    if (missing) return *missing;
    req.file_text = string_arg(args, "file_text");
    req.old_str = string_arg(args, "old_str");
    req.new_str = string_arg(args, "new_str");
    if (args.contains("insert_line")) {
        const auto line = args.at("insert_line").get<std::int64_t>();
        if (line < 0 || line > 100000000) return std::string("argument 'insert_line' must be a nonnegative line number");
        req.insert_line = static_cast<int>(line);
    }
    if (args.contains("view_start") || args.contains("view_end")) {
        const auto start = args.value("view_start", std::int64_t{1});
        const auto end = args.value("view_end", std::int64_t{-1});
        if (start < 1 || start > 100000000 || end < -1 || end > 100000000) {
            return std::string("arguments 'view_start' and 'view_end' must be line numbers (view_end may be -1)");
        }
        req.view_range = std::pair<int, int>{static_cast<int>(start), static_cast<int>(end)};
    }
    return ToolAction{req};
}

}  // namespace

std::optional<std::string> validate_arguments(const ToolSpec& tool, const json& arguments) {
    if (!arguments.is_object()) return fmt::format("arguments for tool {} must be a JSON object", tool.name);
    for (const auto& [key, value] : arguments.items()) {
        const ToolParam* param = tool.find(key);
        if (param == nullptr) return fmt::format("unexpected argument '{}' for tool {}", key, tool.name);
        if (!type_matches(param->type, value)) {
            return fmt::format("argument '{}' of tool {} must be {} {}", key, tool.name, article(param->type),
                               to_string(param->type));
        }
        if (!param->allowed_values.empty() &&
            std::find(param->allowed_values.begin(), param->allowed_values.end(), value.get<std::string>()) ==
                param->allowed_values.end()) {
            return fmt::format("argument '{}' of tool {} must be one of: {}", key, tool.name,
                               fmt::join(param->allowed_values, ", "));
        }
    }
    for (const auto& param : tool.parameters) {
        if (param.required && !arguments.contains(param.name)) {
            return fmt::format("missing required argument '{}' for tool {}", param.name, tool.name);
        }
    }
    return std::nullopt;
}

std::vector<CheckedCall> parse_tool_calls(const ChatMessage& message, const std::vector<ToolSpec>& tools,
                                          const ToolSettings& settings) {
    std::vector<CheckedCall> out;
    out.reserve(message.tool_calls.size());
    for (const auto& call : message.tool_calls) {
        CheckedCall checked{call, std::nullopt, {}};
        auto spec = std::find_if(tools.begin(), tools.end(), [&](const ToolSpec& t) { return t.name == call.name; });
        if (spec == tools.end()) {
            checked.error = fmt::format("unknown tool: {}", call.name);
            out.push_back(std::move(checked));
            continue;
        }
        json args;
        const bool blank = call.arguments.find_first_not_of(" \t\r\n") == std::string::npos;
        if (blank) {
            args = json::object();
        } else {
            args = json::parse(call.arguments, nullptr, false);
            if (args.is_discarded()) {
                checked.error = fmt::format("arguments for tool {} are not valid JSON", call.name);
                out.push_back(std::move(checked));
                continue;
            }
        }
        if (auto err = validate_arguments(*spec, args)) {
            checked.error = std::move(*err);
        } else if (call.name != kBashToolName && call.name != kFileEditToolName && call.name != kFinishToolName) {
            checked.error = fmt::format("unknown tool: {}", call.name);
        } else {
            auto built = build_action(call.name, args, settings);
            if (auto* action = std::get_if<ToolAction>(&built)) {
                checked.action = std::move(*action);
            } else {
                checked.error = std::get<std::string>(built);
            }
        }
        out.push_back(std::move(checked));
    }
    return out;
}

}  // namespace harness
