// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"
#include "harness/llm/chat.hpp"

namespace harness {

enum class SftFormat { function_calling, xml_pseudo_scaffold };
std::string_view to_string(SftFormat format);
/// Accepts function_calling, xml_pseudo_scaffold and xml. Throws ConfigError.
SftFormat sft_format_from_string(std::string_view text);

/// One agent action: tool name plus parsed arguments. Arguments that are not
/// valid JSON are kept as a JSON string holding the raw text.
struct Action {
    std::string tool;
    nlohmann::json arguments;
    bool operator==(const Action&) const = default;
};

/// tool_call and finish events in order.
std::vector<Action> action_sequence(const Trajectory& trajectory);

struct SftSample {
    SftFormat format = SftFormat::function_calling;
    std::string source_trajectory_id;
    std::string stage_label;        // stage1 or stage2
    nlohmann::json conversation;    // {"messages": [...], "tools": [...]?}
    std::string sha256;             // of the dumped conversation

    nlohmann::json to_json() const;
    static SftSample from_json(const nlohmann::json& j);
};

struct ExportInput {
    std::string trajectory_id;
    const Trajectory* trajectory = nullptr;
    std::string stage_label;
};

struct ExportResult {
    std::vector<SftSample> samples;
    std::vector<std::pair<std::string, std::string>> skipped;  // trajectory id, reason
    int duplicates = 0;
};

/// Renders every input in `format`, dropping samples whose rendered
/// conversation hashes equal an earlier one. Trajectories with error events,
/// or with calls the format cannot represent, are skipped and logged.
ExportResult export_sft(const std::vector<ExportInput>& inputs, SftFormat format,
                        const std::vector<ToolSpec>& tools);

/// Renders one trajectory. Throws ValidationError when it cannot be rendered.
nlohmann::json render_conversation(const Trajectory& trajectory, SftFormat format, const std::vector<ToolSpec>& tools);

/// Recovers the action sequence from a rendered conversation. Throws
/// ValidationError on malformed input.
std::vector<Action> parse_conversation(const nlohmann::json& conversation, SftFormat format,
                                       const std::vector<ToolSpec>& tools);

// XML pseudo-scaffold. An assistant turn is its (escaped) text followed by
// one block per call:
//
//   <tool_name>
//   <arg>escaped value</arg>
//   </tool_name>
//
// Values are escaped with &amp; &lt; &gt;. Integers and booleans declared
// by the tool schema are written bare and restored from the schema; any
// other non-string value is written as <arg type="json">...</arg>.
std::string xml_escape(std::string_view text);
std::string xml_unescape(std::string_view text);
std::string render_xml_calls(const std::vector<Action>& actions, const std::vector<ToolSpec>& tools);
std::vector<Action> parse_xml_calls(std::string_view text, const std::vector<ToolSpec>& tools);

}  // namespace harness
