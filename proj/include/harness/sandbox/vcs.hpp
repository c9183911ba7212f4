// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "harness/sandbox/workspace.hpp"

namespace harness {

/// Runs git with a hermetic configuration (no system/global config, fixed
/// identity and dates). Throws InfraError on a nonzero exit.
std::string run_git(const fs::path& repo, const std::vector<std::string>& args,
                    const std::vector<std::string>& extra_env = {});

/// Unified diff of the working tree (tracked and new files, .gitignore
/// respected) against the workspace baseline, ordered by path. Empty when
/// nothing changed. Does not touch the agent-visible index.
std::string extract_patch(const Workspace& workspace);

struct ApplyResult {
    bool ok = false;
    std::string message;
};

/// Applies a patch produced by extract_patch (or any git-style unified
/// diff). Blank patches succeed without running git.
ApplyResult apply_patch(const fs::path& root, std::string_view patch);

}  // namespace harness
