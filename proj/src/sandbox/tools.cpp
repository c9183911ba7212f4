// SPDX-License-Identifier: Apache-2.0
#include "harness/sandbox/tools.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/subprocess.hpp"

namespace harness {

namespace {

// Restores the persisted cwd and exported environment, runs the command via
// eval, and persists both again from an EXIT trap so `exit` in the command
// still saves state. A cwd outside the workspace is not persisted.
constexpr std::string_view kShellPrelude = R"SH(__h_root=$HARNESS_ROOT
__h_state=$HARNESS_STATE
unset HARNESS_ROOT HARNESS_STATE
[ -f "$__h_state/env" ] && . "$__h_state/env" >/dev/null 2>&1
cd "$(cat "$__h_state/cwd" 2>/dev/null)" 2>/dev/null || cd "$__h_root"
__h_save() {
  __h_rc=$?
  export -p > "$__h_state/env" 2>/dev/null
  case "$PWD/" in
    "$__h_root"/*) printf '%s' "$PWD" > "$__h_state/cwd" ;;
    *) printf '%s' "$__h_root" > "$__h_state/cwd"
       printf '\n[working directory %s is outside the workspace; the next command starts in %s]\n' "$PWD" "$__h_root" ;;
  esac
  exit $__h_rc
}
trap __h_save EXIT
__h_cmd=$(cat "$__h_state/cmd")
eval "$__h_cmd"
)SH";

ToolResult text_result(std::string text) {
    ToolResult r;
    r.output = std::move(text);
    return r;
}

ToolResult in_band_error(std::string message) {
    ToolResult r;
    r.output = std::move(message);
    r.error = true;
    return r;
}

std::string display_path(const Workspace& ws, const fs::path& resolved) {
    std::error_code ec;
    const fs::path root = fs::weakly_canonical(ws.root, ec);
    return resolved.lexically_relative(root).generic_string();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string numbered(const std::vector<std::string>& lines, int first, int last) {
    std::string out;
    for (int i = first; i <= last; ++i) out += fmt::format("{:6}\t{}\n", i, lines[static_cast<std::size_t>(i - 1)]);
    return out;
}

// Numbered excerpt around lines [from, to] of the edited file.
std::string snippet(const std::string& content, int from, int to) {
    const auto lines = split_lines(content);
    if (lines.empty()) return "";
    const int first = std::max(1, from - 3);
    const int last = std::min(static_cast<int>(lines.size()), to + 3);
    if (first > last) return "";
    return numbered(lines, first, last);
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = haystack.find(needle); pos != std::string::npos; pos = haystack.find(needle, pos + needle.size())) ++n;
    return n;
}

int line_of(const std::string& text, std::size_t offset) {
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

bool write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    return static_cast<bool>(out);
}

ToolResult view(const Workspace& ws, const fs::path& path, const FileEditRequest& req) {
    const std::string shown = display_path(ws, path);
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        std::vector<std::string> entries;
        for (auto it = fs::recursive_directory_iterator(path); it != fs::recursive_directory_iterator(); ++it) {
            const auto name = it->path().filename().string();
            if (!name.empty() && name[0] == '.') {
                it.disable_recursion_pending();
                continue;
            }
            if (it.depth() >= 1) it.disable_recursion_pending();
            entries.push_back(display_path(ws, it->path()) + (it->is_directory() ? "/" : ""));
        }
        std::sort(entries.begin(), entries.end());
        std::string out = fmt::format("Files and directories up to 2 levels deep in {}:\n", shown.empty() ? "." : shown);
        for (const auto& e : entries) out += e + "\n";
        return text_result(out);
    }
    if (!fs::is_regular_file(path, ec)) return in_band_error(fmt::format("Error: the path {} does not exist.", shown));
    const std::string content = read_file(path);
    const auto lines = split_lines(content);
    const int n = static_cast<int>(lines.size());
    int first = 1;
    int last = n;
    if (req.view_range) {
        first = req.view_range->first;
        last = req.view_range->second == -1 ? n : req.view_range->second;
        if (first < 1 || first > std::max(n, 1) || last < first || last > n) {
            return in_band_error(fmt::format("Error: invalid view_range [{}, {}]; {} has {} lines.",
                                             req.view_range->first, req.view_range->second, shown, n));
        }
    }
    return text_result(numbered(lines, first, last));
}

ToolResult create(const Workspace& ws, const fs::path& path, const FileEditRequest& req) {
    const std::string shown = display_path(ws, path);
    std::error_code ec;
    if (fs::exists(path, ec) || fs::is_symlink(path, ec)) {
        return in_band_error(fmt::format("Error: {} already exists; create does not overwrite files.", shown));
    }
    fs::create_directories(path.parent_path(), ec);
    if (ec || !write_text(path, req.file_text)) return in_band_error(fmt::format("Error: cannot write {}.", shown));
    return text_result(fmt::format("File created successfully at: {}", shown));
}

ToolResult str_replace(const Workspace& ws, const fs::path& path, const FileEditRequest& req) {
    const std::string shown = display_path(ws, path);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return in_band_error(fmt::format("Error: the path {} does not exist.", shown));
    if (req.old_str.empty()) return in_band_error("Error: old_str must not be empty.");
    std::string content = read_file(path);
    const std::size_t count = count_occurrences(content, req.old_str);
    if (count != 1) {
        return in_band_error(fmt::format(
            "Error: no replacement performed: old_str has {} occurrences in {}; it must occur exactly once.", count, shown));
    }
    const std::size_t at = content.find(req.old_str);
    content.replace(at, req.old_str.size(), req.new_str);
    if (!write_text(path, content)) return in_band_error(fmt::format("Error: cannot write {}.", shown));
    const int from = line_of(content, at);
    const int to = line_of(content, at + req.new_str.size());
    return text_result(fmt::format("The file {} has been edited. Excerpt of the result:\n{}", shown, snippet(content, from, to)));
}

ToolResult insert(const Workspace& ws, const fs::path& path, const FileEditRequest& req) {
    const std::string shown = display_path(ws, path);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) return in_band_error(fmt::format("Error: the path {} does not exist.", shown));
    std::string content = read_file(path);
    const int n = static_cast<int>(split_lines(content).size());
    if (req.insert_line < 0 || req.insert_line > n) {
        return in_band_error(fmt::format("Error: insert_line {} is outside [0, {}] for {}.", req.insert_line, n, shown));
    }
    std::size_t offset = 0;
    for (int i = 0; i < req.insert_line; ++i) {
        auto nl = content.find('\n', offset);
        offset = nl == std::string::npos ? content.size() : nl + 1;
    }
    std::string text = req.new_str;
    if (text.empty() || text.back() != '\n') text += '\n';
    if (offset == content.size() && !content.empty() && content.back() != '\n') {
        content += '\n';
        offset = content.size();
    }
    content.insert(offset, text);
    if (!write_text(path, content)) return in_band_error(fmt::format("Error: cannot write {}.", shown));
    const int inserted = static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    return text_result(fmt::format("The file {} has been edited. Excerpt of the result:\n{}", shown,
                        snippet(content, req.insert_line + 1, req.insert_line + inserted)));
}

}  // namespace

ToolResult bash_execute(const Workspace& ws, std::string_view command, int timeout_seconds,
                        const ToolSettings& settings, const std::atomic<bool>* cancel) {
    fs::create_directories(ws.shell_state);
    write_file_atomic(ws.shell_state / "cmd", command);

    ProcessOptions opts;
    opts.argv = {"bash", "--noprofile", "--norc", "-c", std::string(kShellPrelude)};
    opts.cwd = ws.root;
    opts.env = sandbox_environment(ws);
    opts.env.push_back("HARNESS_ROOT=" + ws.root.string());
    opts.env.push_back("HARNESS_STATE=" + ws.shell_state.string());
    opts.timeout = std::chrono::seconds(std::max(1, timeout_seconds));
    opts.cancel = cancel;
    opts.capture_limit = std::max<std::size_t>(settings.observation_cap, 1 << 16);

    ProcessResult r = run_process(opts);
    ToolResult result;
    result.wall_time_seconds = r.wall_seconds;
    result.exit_code = r.exit_code;
    result.timed_out = r.timed_out;

    std::string note;
    if (r.timed_out) {
        note = fmt::format("\n[command timed out after {}s; its process group was killed]", timeout_seconds);
    } else if (r.cancelled) {
        note = "\n[command cancelled]";
    }
    const std::size_t cap = settings.observation_cap > note.size() ? settings.observation_cap - note.size() : 0;
    std::string output = to_valid_utf8(r.output);
    const std::size_t total = r.total_bytes + (output.size() - r.output.size());
    auto cut = truncate_output(output, total, cap);
    result.output = std::move(cut.text) + note;
    result.truncated = cut.truncated;
    return result;
}

std::string_view to_string(EditAction action) {
    switch (action) {
        case EditAction::view: return "view";
        case EditAction::create: return "create";
        case EditAction::str_replace: return "str_replace";
        case EditAction::insert: return "insert";
    }
    return "view";
}

std::optional<EditAction> edit_action_from_string(std::string_view text) {
    for (auto a : {EditAction::view, EditAction::create, EditAction::str_replace, EditAction::insert}) {
        if (to_string(a) == text) return a;
    }
    return std::nullopt;
}

ToolResult file_edit(const Workspace& ws, const FileEditRequest& req, const ToolSettings& settings) {
    const auto started = std::chrono::steady_clock::now();
    auto resolved = resolve_in_workspace(ws, req.path);
    ToolResult result;
    if (!resolved) {
        result = in_band_error(
            fmt::format("Error: refusing to access '{}': paths must stay inside the workspace (and outside .git).", req.path));
    } else {
        try {
            switch (req.action) {
                case EditAction::view: result = view(ws, *resolved, req); break;
                case EditAction::create: result = create(ws, *resolved, req); break;
                case EditAction::str_replace: result = str_replace(ws, *resolved, req); break;
                case EditAction::insert: result = insert(ws, *resolved, req); break;
            }
        } catch (const std::exception& e) {
            result = in_band_error(fmt::format("Error: {}", e.what()));
        }
    }
    result.output = to_valid_utf8(result.output);
    auto cut = truncate_output(result.output, result.output.size(), settings.observation_cap);
    result.output = std::move(cut.text);
    result.truncated = cut.truncated;
    result.exit_code.reset();
    result.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace harness
