// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace harness {

/// True iff the patch changes no tree content: blank text, headers without
/// hunks, and mode-only changes are all empty. Hunk lines, binary payloads,
/// and file creation/deletion count as content changes.
bool is_empty_patch(std::string_view patch);

}  // namespace harness
