// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>

#include "harness/core/types.hpp"
#include "harness/llm/backend.hpp"

namespace harness {

struct EpisodeBudget {
    int max_iterations = 50;
    int elapsed_turns = 0;

    bool exhausted() const { return elapsed_turns >= max_iterations; }
};

struct EpisodeOptions {
    int attempt_index = 1;
    SamplingParams params;
    EpisodeBudget budget;
    ToolSettings tools;
    int strike_limit = 5;               // consecutive turns with a rejected call
    fs::path attempt_dir;               // receives events.jsonl, requests.jsonl, patch.diff, summary.json
    bool keep_workspace = false;
    const std::atomic<bool>* cancel = nullptr;
};

/// Runs one attempt in a freshly provisioned workspace and returns its
/// record with resolved = not_evaluated. Provisioning and backend failures
/// yield status infra_error rather than an exception.
///
/// Throws ValidationError for an invalid instance (before any side effect)
/// and Interrupted when `cancel` fires; an interrupted attempt leaves no
/// summary.json behind.
AttemptRecord run_episode(const TaskInstance& instance, Backend& backend, const EpisodeOptions& options);

}  // namespace harness
