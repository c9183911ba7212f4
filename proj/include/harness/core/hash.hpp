// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "harness/core/types.hpp"

namespace harness {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

std::string base64_encode(std::string_view data);
/// Throws ValidationError on malformed input.
std::string base64_decode(std::string_view text);

}  // namespace harness
