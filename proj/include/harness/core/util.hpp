// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "harness/core/types.hpp"

namespace harness {

std::string read_file(const fs::path& path);
/// Writes via a temporary sibling and rename so readers never see a torn file.
void write_file_atomic(const fs::path& path, std::string_view content);

std::int64_t now_ms();

/// Shortest decimal text that round-trips, always with a fractional part
/// ("0.0", "0.1", "1.0", "0.25").
std::string format_decimal(double value);

/// Round half-up to `digits` decimals and print with exactly that many.
std::string format_fixed_half_up(double value, int digits);

/// POSIX single-quote shell quoting.
std::string shell_quote(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

bool is_valid_utf8(std::string_view text);
/// Replaces each malformed UTF-8 sequence with U+FFFD.
std::string to_valid_utf8(std::string_view text);

}  // namespace harness
