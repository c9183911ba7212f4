// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "harness/core/types.hpp"

namespace harness {

/// Loads a line-delimited suite file. Relative repo_source paths resolve
/// against the suite file's directory. Blank lines are skipped; ids must be
/// unique. Throws ConfigError (unreadable file, bad JSON) or ValidationError.
std::vector<TaskInstance> load_suite(const fs::path& path);

}  // namespace harness
