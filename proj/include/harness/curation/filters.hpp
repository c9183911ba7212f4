// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "harness/core/types.hpp"

namespace harness {

// Stage-1 reason codes.
inline constexpr const char* kReasonNotFinished = "not_finished";
inline constexpr const char* kReasonEmptyPatch = "empty_patch";
inline constexpr const char* kReasonTooFewTurns = "too_few_turns";
inline constexpr const char* kReasonTooManyTurns = "too_many_turns";
inline constexpr const char* kReasonAgentErrorStrikes = "agent_error_strikes";
// Stage-2 reason codes.
inline constexpr const char* kReasonStage1Failed = "stage1_failed";
inline constexpr const char* kReasonUnverified = "unverified";
inline constexpr const char* kReasonTestsFailed = "tests_failed";

inline constexpr int kMinCuratedTurns = 2;

struct FilterVerdict {
    std::string trajectory_id;
    bool stage1_pass = false;
    std::vector<std::string> stage1_reasons;
    bool stage2_pass = false;
    std::vector<std::string> stage2_reasons;
};

/// Heuristic gate: finished, non-empty patch, assistant turns within
/// [2, max_iterations], and no rejected tool calls. Reasons list every
/// failed check. Turn and rejection counts come from the events when
/// present, else from the record.
FilterVerdict stage1_filter(const std::string& trajectory_id, const Trajectory& trajectory,
                            const AttemptRecord& attempt);

/// Strict gate: stage 1 passed and verification resolved the instance.
FilterVerdict stage2_filter(FilterVerdict verdict, const std::optional<VerificationResult>& verification);

}  // namespace harness
