// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <memory>

#include "harness/core/types.hpp"
#include "harness/eval/protocol.hpp"
#include "harness/llm/backend.hpp"

namespace harness {

/// <root>/instances/<id>/attempt<k>/
fs::path attempt_directory(const fs::path& root, const std::string& instance_id, int attempt_index);

/// The production executor: run_episode in attempt_directory(output_dir, ...),
/// then verify the patch in a scratch copy next to it. The verification
/// outcome is folded into summary.json. Verification infrastructure
/// failures turn the attempt into infra_error.
AttemptExecutor make_episode_executor(std::shared_ptr<Backend> backend, const RunConfig& config,
                                      const fs::path& output_dir, const std::atomic<bool>* cancel);

}  // namespace harness
