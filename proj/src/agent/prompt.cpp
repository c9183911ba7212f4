// SPDX-License-Identifier: Apache-2.0
#include "harness/agent/prompt.hpp"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "harness/core/errors.hpp"

namespace harness {

std::string build_system_prompt(const TaskInstance& instance) {
    const auto& problem = instance.problem_statement;
    if (std::all_of(problem.begin(), problem.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw ValidationError(fmt::format("instance {}: problem_statement is empty", instance.id));
    }
    std::string prompt;
    prompt +=
        "You are a software engineer working in a sandboxed copy of a code repository. "
        "The repository is your current working directory. You have no network access.\n\n";
    prompt += "<issue>\n";
    prompt += problem;
    if (problem.back() != '\n') prompt += '\n';
    prompt += "</issue>\n\n";
    prompt +=
        "Change the repository so that the issue above is resolved.\n\n"
        "Rules:\n"
        "- Act only through the provided tools. Each reply may call one or more tools.\n"
        "- Use the bash tool to explore the code and run commands. The working directory and exported "
        "variables persist between calls. Commands that run too long are killed.\n"
        "- Use the file_edit tool to view, create and edit files. Paths are relative to the repository root.\n"
        "- Do not modify the existing tests unless the issue requires it.\n"
        "- When the change is complete, call the finish tool. Your work is evaluated from the final "
        "state of the repository.\n";
    return prompt;
}

std::string_view kickoff_message() {
    return "Please resolve the issue described in the system message. Start by exploring the repository.";
}

std::string_view nudge_message() {
    return "No tool was called. Continue working on the issue using the tools, or call finish if you are done.";
}

std::vector<ToolSpec> default_tools(const ToolSettings& settings) {
    ToolSpec bash{std::string(kBashToolName),
                  "Run a shell command with bash in the repository. stdout and stderr are returned together; "
                  "long output is truncated in the middle.",
                  {
                      {"command", ParamType::string, "The command to run.", true, {}},
                      {"timeout", ParamType::integer,
                       fmt::format("Time limit in seconds (default {}, maximum {}).", settings.default_bash_timeout,
                                   settings.max_bash_timeout),
                       false, {}},
                  }};
    ToolSpec edit{std::string(kFileEditToolName),
                  "View, create and edit files. view prints numbered lines (or lists a directory); create writes a "
                  "new file; str_replace replaces old_str, which must occur exactly once, with new_str; insert adds "
                  "new_str after line insert_line (0 inserts at the top).",
                  {
                      {"action", ParamType::string, "The operation to perform.", true,
                       {"view", "create", "str_replace", "insert"}},
                      {"path", ParamType::string, "File or directory path, relative to the repository root.", true, {}},
                      {"file_text", ParamType::string, "Content of the new file (create).", false, {}},
                      {"old_str", ParamType::string, "Exact text to replace (str_replace).", false, {}},
                      {"new_str", ParamType::string, "Replacement or inserted text (str_replace, insert).", false, {}},
                      {"insert_line", ParamType::integer, "Line after which new_str is inserted (insert).", false, {}},
                      {"view_start", ParamType::integer, "First line to show, 1-based (view).", false, {}},
                      {"view_end", ParamType::integer, "Last line to show; -1 for end of file (view).", false, {}},
                  }};
    ToolSpec finish{std::string(kFinishToolName),
                    "Declare the task complete. The episode ends after this call.",
                    {{"message", ParamType::string, "Short summary of the change.", false, {}}}};
    return {bash, edit, finish};
}

}  // namespace harness
