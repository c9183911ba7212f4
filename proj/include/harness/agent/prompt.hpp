// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "harness/core/types.hpp"
#include "harness/llm/chat.hpp"

namespace harness {

inline constexpr std::string_view kBashToolName = "bash";
inline constexpr std::string_view kFileEditToolName = "file_edit";

/// Deterministic system prompt: role, the problem statement verbatim, tool
/// rules. Carries no worked tool-use examples and no host paths.
/// Throws ValidationError for a blank problem statement.
std::string build_system_prompt(const TaskInstance& instance);

/// First user message of every episode.
std::string_view kickoff_message();

/// Reply to an assistant turn that contained no tool call.
std::string_view nudge_message();

/// bash, file_edit and finish.
std::vector<ToolSpec> default_tools(const ToolSettings& settings);

}  // namespace harness
