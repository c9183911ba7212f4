// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "harness/core/types.hpp"

namespace harness {

/// Fixed modification time applied to every provisioned file
/// (2000-01-01T00:00:00Z) so prompts never depend on checkout time.
inline constexpr std::int64_t kNormalizedMtime = 946684800;

/// A per-attempt copy of an instance repository.
///
/// Layout under the attempt directory:
///   workspace/  the repository the agent works in (root)
///   .shell/     persisted cwd and environment of the bash tool
struct Workspace {
    fs::path root;
    std::string instance_id;
    int attempt_index = 0;
    fs::path shell_state;
    std::string baseline;  // commit the patch is taken against
};

/// Creates a fresh workspace from the instance snapshot: copy (or clone at
/// base_revision, or unpack), run setup_commands, normalise mtimes, and
/// commit the result as the baseline. Any existing directory at that place
/// is removed first. Throws InfraError when a setup command fails or the
/// snapshot cannot be materialised.
Workspace provision(const TaskInstance& instance, int attempt_index, const fs::path& attempt_dir);

/// Removes the workspace root and shell state.
void teardown(const Workspace& workspace);

/// Environment every sandboxed command runs with.
std::vector<std::string> sandbox_environment(const Workspace& workspace);

/// Resolves a tool path (relative to root, or absolute inside root). Returns
/// nullopt for paths that escape the root, including through symlinks, and
/// for paths inside .git.
std::optional<fs::path> resolve_in_workspace(const Workspace& workspace, std::string_view path);

/// Relative path -> SHA-256 of file content (symlinks hash their target
/// text), excluding .git. Used as a tree-equality oracle.
std::map<std::string, std::string> tree_snapshot(const fs::path& root);
std::string tree_hash(const fs::path& root);

}  // namespace harness
