// SPDX-License-Identifier: Apache-2.0
#include "harness/curation/export.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "harness/core/errors.hpp"
#include "harness/core/hash.hpp"
#include "harness/llm/wire.hpp"

namespace harness {

using json = nlohmann::json;

namespace {

json parse_arguments(const std::string& raw) {
    if (raw.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    json j = json::parse(raw, nullptr, false);
    return j.is_discarded() ? json(raw) : j;
}

bool is_xml_name(std::string_view name) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.';
    });
}

const ToolParam* find_param(const std::vector<ToolSpec>& tools, std::string_view tool, std::string_view arg) {
    for (const auto& t : tools) {
        if (t.name == tool) return t.find(arg);
    }
    return nullptr;
}

bool bare_value(const ToolParam* p, const json& value) {
    if (p == nullptr) return false;
    return (p->type == ParamType::integer && value.is_number_integer()) ||
           (p->type == ParamType::boolean && value.is_boolean());
}

std::string xml_system_suffix(const std::vector<ToolSpec>& tools) {
    std::string out =
        "\n\nTo call a tool, write a block that opens with the tool name as a tag, holds one tag per argument, "
        "and closes with the tool name. Escape &, < and > in values as &amp;, &lt; and &gt;.\n\nTools:\n";
    for (const auto& t : tools) {
        std::vector<std::string> params;
        for (const auto& p : t.parameters) {
            params.push_back(fmt::format("{} ({}{})", p.name, to_string(p.type), p.required ? ", required" : ""));
        }
        out += fmt::format("- {}: {}", t.name, t.description);
        if (!params.empty()) out += fmt::format(" Arguments: {}.", fmt::join(params, "; "));
        out += "\n";
    }
    return out;
}

class XmlReader {
public:
    explicit XmlReader(std::string_view text) : s_(text) {}

    bool at_end() const { return pos_ >= s_.size(); }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    // Advances to the next '<' and returns the text skipped.
    std::string_view text_until_tag() {
        const auto start = pos_;
        pos_ = std::min(s_.find('<', pos_), s_.size());
        return s_.substr(start, pos_ - start);
    }

    // Reads "<...>" at the current position and returns its inside.
    std::string_view tag() {
        if (pos_ >= s_.size() || s_[pos_] != '<') fail("expected a tag");
        const auto close = s_.find('>', pos_);
        if (close == std::string_view::npos) fail("unterminated tag");
        auto inner = s_.substr(pos_ + 1, close - pos_ - 1);
        pos_ = close + 1;
        return inner;
    }

    bool peek_closing() const { return s_.compare(pos_, 2, "</") == 0; }

    [[noreturn]] void fail(const char* what) const {
        throw ValidationError(fmt::format("xml pseudo-scaffold: {} at offset {}", what, pos_));
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

Action read_call(XmlReader& r, std::string name, const std::vector<ToolSpec>& tools) {
    Action action{std::move(name), json::object()};
    for (;;) {
        r.skip_space();
        if (r.at_end()) r.fail("unterminated tool block");
        if (r.peek_closing()) {
            auto closing = r.tag();
            if (closing.substr(1) != action.tool) r.fail("mismatched closing tag");
            return action;
        }
        std::string_view open = r.tag();
        bool as_json = false;
        std::string_view arg = open;
        if (auto sp = open.find(' '); sp != std::string_view::npos) {
            if (open.substr(sp + 1) != "type=\"json\"") r.fail("unsupported attribute");
            arg = open.substr(0, sp);
            as_json = true;
        }
        if (!is_xml_name(arg)) r.fail("invalid argument tag");
        const std::string value = xml_unescape(r.text_until_tag());
        auto closing = r.tag();
        if (closing.size() < 2 || closing[0] != '/' || closing.substr(1) != arg) r.fail("mismatched argument tag");
        const std::string key(arg);
        if (action.arguments.contains(key)) r.fail("duplicate argument");
        const ToolParam* param = find_param(tools, action.tool, arg);
        if (as_json || (param != nullptr && param->type != ParamType::string)) {
            json parsed = json::parse(value, nullptr, false);
            if (parsed.is_discarded()) r.fail("argument is not valid JSON");
            if (!as_json && !bare_value(param, parsed)) r.fail("argument does not match its declared type");
            action.arguments[key] = std::move(parsed);
        } else {
            action.arguments[key] = value;
        }
    }
}

}  // namespace

std::string_view to_string(SftFormat format) {
    return format == SftFormat::function_calling ? "function_calling" : "xml_pseudo_scaffold";
}

SftFormat sft_format_from_string(std::string_view text) {
    if (text == "function_calling") return SftFormat::function_calling;
    if (text == "xml_pseudo_scaffold" || text == "xml") return SftFormat::xml_pseudo_scaffold;
    throw ConfigError(fmt::format("unknown export format '{}' (expected function_calling or xml)", text));
}

std::vector<Action> action_sequence(const Trajectory& t) {
    std::vector<Action> actions;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::tool_call) {
            const auto& c = std::get<ToolCallPayload>(e.payload);
            actions.push_back({c.name, parse_arguments(c.arguments)});
        } else if (e.kind == EventKind::finish) {
            actions.push_back({std::string(kFinishToolName), parse_arguments(std::get<FinishPayload>(e.payload).arguments)});
        }
    }
    return actions;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string xml_unescape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '&') {
            auto rest = text.substr(i);
            if (rest.rfind("&amp;", 0) == 0) { out += '&'; i += 4; continue; }
            if (rest.rfind("&lt;", 0) == 0) { out += '<'; i += 3; continue; }
            if (rest.rfind("&gt;", 0) == 0) { out += '>'; i += 3; continue; }
            throw ValidationError("xml pseudo-scaffold: bad entity");
        }
        out += text[i];
    }
    return out;
}

std::string render_xml_calls(const std::vector<Action>& actions, const std::vector<ToolSpec>& tools) {
    std::string out;
    for (const auto& a : actions) {
        if (!is_xml_name(a.tool)) throw ValidationError(fmt::format("tool name '{}' is not representable", a.tool));
        if (!a.arguments.is_object()) {
            throw ValidationError(fmt::format("arguments of {} are not a JSON object", a.tool));
        }
        if (!out.empty()) out += '\n';
        out += "<" + a.tool + ">\n";
        for (const auto& [key, value] : a.arguments.items()) {
            if (!is_xml_name(key)) throw ValidationError(fmt::format("argument name '{}' is not representable", key));
            const ToolParam* param = find_param(tools, a.tool, key);
            if (value.is_string() && (param == nullptr || param->type == ParamType::string)) {
                out += fmt::format("<{0}>{1}</{0}>\n", key, xml_escape(value.get<std::string>()));
            } else if (bare_value(param, value)) {
                out += fmt::format("<{0}>{1}</{0}>\n", key, value.dump());
            } else {
                out += fmt::format("<{0} type=\"json\">{1}</{0}>\n", key, xml_escape(value.dump()));
            }
        }
        out += "</" + a.tool + ">";
    }
    return out;
}

std::vector<Action> parse_xml_calls(std::string_view text, const std::vector<ToolSpec>& tools) {
    std::vector<Action> actions;
    XmlReader r(text);
    for (;;) {
        r.text_until_tag();
        if (r.at_end()) break;
        std::string_view name = r.tag();
        if (!is_xml_name(name)) r.fail("invalid tool tag");
        actions.push_back(read_call(r, std::string(name), tools));
    }
    return actions;
}

json render_conversation(const Trajectory& t, SftFormat format, const std::vector<ToolSpec>& tools) {
    for (const auto& e : t.events) {
        if (e.kind == EventKind::error) throw ValidationError(fmt::format("event {} has unrenderable kind error", e.index));
    }
    const auto messages = messages_from_events(t.events);
    json out = json::array();
    if (format == SftFormat::function_calling) {
        for (const auto& m : messages) {
            for (const auto& c : m.tool_calls) {
                if (parse_arguments(c.arguments).is_string()) {
                    throw ValidationError(fmt::format("call {} has malformed arguments", c.id));
                }
            }
            out.push_back(to_wire_message(m));
        }
        return {{"messages", out}, {"tools", to_wire_tools(tools)}};
    }
    for (const auto& m : messages) {
        switch (m.role) {
            case Role::system:
                out.push_back({{"role", "system"}, {"content", m.content + xml_system_suffix(tools)}});
                break;
            case Role::user:
                out.push_back({{"role", "user"}, {"content", m.content}});
                break;
            case Role::tool:
                out.push_back({{"role", "user"}, {"content", m.content}});
                break;
            case Role::assistant: {
                std::vector<Action> calls;
                for (const auto& c : m.tool_calls) calls.push_back({c.name, parse_arguments(c.arguments)});
                std::string content = xml_escape(m.content);
                const std::string blocks = render_xml_calls(calls, tools);
                if (!content.empty() && !blocks.empty()) content += '\n';
                out.push_back({{"role", "assistant"}, {"content", content + blocks}});
                break;
            }
        }
    }
    return {{"messages", out}};
}

std::vector<Action> parse_conversation(const json& conversation, SftFormat format, const std::vector<ToolSpec>& tools) {
    std::vector<Action> actions;
    try {
        for (const auto& m : conversation.at("messages")) {
            if (m.at("role").get<std::string>() != "assistant") continue;
            if (format == SftFormat::function_calling) {
                if (!m.contains("tool_calls")) continue;
                for (const auto& c : m.at("tool_calls")) {
                    const auto& fn = c.at("function");
                    actions.push_back({fn.at("name").get<std::string>(),
                                       parse_arguments(fn.at("arguments").get<std::string>())});
                }
            } else {
                auto calls = parse_xml_calls(m.at("content").get<std::string>(), tools);
                actions.insert(actions.end(), calls.begin(), calls.end());
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed conversation: {}", e.what()));
    }
    return actions;
}

json SftSample::to_json() const {
    return {{"format", to_string(format)},
            {"source_trajectory_id", source_trajectory_id},
            {"stage_label", stage_label},
            {"sha256", sha256},
            {"conversation", conversation}};
}

SftSample SftSample::from_json(const json& j) {
    SftSample s;
    try {
        s.format = sft_format_from_string(j.at("format").get<std::string>());
        s.source_trajectory_id = j.at("source_trajectory_id").get<std::string>();
        s.stage_label = j.at("stage_label").get<std::string>();
        s.sha256 = j.at("sha256").get<std::string>();
        s.conversation = j.at("conversation");
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed sample: {}", e.what()));
    }
    return s;
}

ExportResult export_sft(const std::vector<ExportInput>& inputs, SftFormat format, const std::vector<ToolSpec>& tools) {
    ExportResult result;
    std::set<std::string> seen;
    for (const auto& in : inputs) {
        json conversation;
        try {
            conversation = render_conversation(*in.trajectory, format, tools);
        } catch (const ValidationError& e) {
            spdlog::warn("skipping {}: {}", in.trajectory_id, e.what());
            result.skipped.emplace_back(in.trajectory_id, e.what());
            continue;
        }
        std::string digest = sha256_hex(conversation.dump());
        if (!seen.insert(digest).second) {
            ++result.duplicates;
            continue;
        }
        result.samples.push_back({format, in.trajectory_id, in.stage_label, std::move(conversation), std::move(digest)});
    }
    return result;
}

}  // namespace harness
