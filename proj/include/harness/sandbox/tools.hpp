// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <utility>

#include "harness/core/types.hpp"
#include "harness/sandbox/workspace.hpp"

namespace harness {

struct ToolResult {
    std::string output;
    std::optional<int> exit_code;  // none for editor operations and timeouts
    bool truncated = false;
    bool timed_out = false;
    bool error = false;            // in-band failure reported to the agent
    double wall_time_seconds = 0.0;
};

/// Runs `command` with bash in the workspace. The working directory and
/// exported environment persist across calls. Leaving the workspace root is
/// not persisted: the next call starts back at the root and the current call
/// reports the reset.
ToolResult bash_execute(const Workspace& workspace, std::string_view command, int timeout_seconds,
                        const ToolSettings& settings, const std::atomic<bool>* cancel = nullptr);

enum class EditAction { view, create, str_replace, insert };
std::string_view to_string(EditAction action);
std::optional<EditAction> edit_action_from_string(std::string_view text);

struct FileEditRequest {
    EditAction action = EditAction::view;
    std::string path;
    std::string file_text;                          // create
    std::string old_str;                            // str_replace
    std::string new_str;                            // str_replace, insert
    int insert_line = 0;                            // insert: after this 1-based line; 0 = top
    std::optional<std::pair<int, int>> view_range;  // view: [start, end], end -1 = to EOF

    bool operator==(const FileEditRequest&) const = default;
};

/// The file edition tool. Every failure is in-band (ToolResult::error).
ToolResult file_edit(const Workspace& workspace, const FileEditRequest& request, const ToolSettings& settings);

}  // namespace harness
