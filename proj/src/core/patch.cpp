// SPDX-License-Identifier: Apache-2.0
#include "harness/core/patch.hpp"

#include <charconv>
#include <string>

namespace harness {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos; }

// Parses "-a[,b]" or "+c[,d]" and returns the line count (default 1).
long range_length(std::string_view token) {
    token.remove_prefix(1);
    auto comma = token.find(',');
    if (comma == std::string_view::npos) return 1;
    long n = 1;
    auto tail = token.substr(comma + 1);
    std::from_chars(tail.data(), tail.data() + tail.size(), n);
    return n;
}

struct HunkCounts {
    long old_lines = -1;
    long new_lines = -1;
};

HunkCounts parse_hunk_header(std::string_view line) {
    HunkCounts counts;
    auto minus = line.find(" -");
    auto plus = line.find(" +", minus == std::string_view::npos ? 0 : minus);
    if (minus == std::string_view::npos || plus == std::string_view::npos) return counts;
    auto old_tok = line.substr(minus + 1, line.find(' ', minus + 1) - (minus + 1));
    auto new_tok = line.substr(plus + 1, line.find(' ', plus + 1) - (plus + 1));
    counts.old_lines = range_length(old_tok);
    counts.new_lines = range_length(new_tok);
    return counts;
}

}  // namespace

bool is_empty_patch(std::string_view patch) {
    long old_left = 0;
    long new_left = 0;
    bool lenient_hunk = false;  // hunk header without parsable counts
    std::size_t pos = 0;
    while (pos < patch.size()) {
        auto end = patch.find('\n', pos);
        if (end == std::string_view::npos) end = patch.size();
        std::string_view line = patch.substr(pos, end - pos);
        pos = end + 1;

        if (old_left > 0 || new_left > 0) {
            if (line.empty() || line[0] == ' ') {
                --old_left;
                --new_left;
            } else if (line[0] == '-' || line[0] == '+') {
                return false;
            } else if (line[0] == '\\') {
                // "\ No newline at end of file"
            } else {
                old_left = new_left = 0;
            }
            continue;
        }
        if (is_blank(line)) continue;
        if (starts_with(line, "@@")) {
            auto counts = parse_hunk_header(line);
            lenient_hunk = counts.old_lines < 0;
            old_left = std::max(0L, counts.old_lines);
            new_left = std::max(0L, counts.new_lines);
            continue;
        }
        if (starts_with(line, "GIT binary patch") || starts_with(line, "Binary files ") ||
            starts_with(line, "new file mode") || starts_with(line, "deleted file mode") ||
            starts_with(line, "rename from") || starts_with(line, "copy from")) {
            return false;
        }
        if (lenient_hunk && (line[0] == '+' || line[0] == '-') && !starts_with(line, "+++") &&
            !starts_with(line, "---")) {
            return false;
        }
    }
    return true;
}

}  // namespace harness
