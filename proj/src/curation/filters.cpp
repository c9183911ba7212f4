// SPDX-License-Identifier: Apache-2.0
#include "harness/curation/filters.hpp"

namespace harness {

FilterVerdict stage1_filter(const std::string& trajectory_id, const Trajectory& trajectory,
                            const AttemptRecord& attempt) {
    FilterVerdict v;
    v.trajectory_id = trajectory_id;
    const bool have_events = !trajectory.events.empty();
    const int turns = have_events ? trajectory.assistant_turns() : attempt.assistant_turns;
    const int rejected = have_events ? trajectory.rejected_calls() : attempt.rejected_calls;

    if (attempt.status != AttemptStatus::finished) v.stage1_reasons.emplace_back(kReasonNotFinished);
    if (attempt.patch_empty()) v.stage1_reasons.emplace_back(kReasonEmptyPatch);
    if (turns < kMinCuratedTurns) v.stage1_reasons.emplace_back(kReasonTooFewTurns);
    if (attempt.max_iterations > 0 && turns > attempt.max_iterations) v.stage1_reasons.emplace_back(kReasonTooManyTurns);
    if (rejected > 0 || attempt.status == AttemptStatus::agent_error) {
        v.stage1_reasons.emplace_back(kReasonAgentErrorStrikes);
    }
    v.stage1_pass = v.stage1_reasons.empty();
    return v;
}

FilterVerdict stage2_filter(FilterVerdict v, const std::optional<VerificationResult>& verification) {
    v.stage2_reasons.clear();
    if (!v.stage1_pass) v.stage2_reasons.emplace_back(kReasonStage1Failed);
    if (!verification) {
        v.stage2_reasons.emplace_back(kReasonUnverified);
    } else if (!verification->resolved) {
        v.stage2_reasons.emplace_back(kReasonTestsFailed);
    }
    v.stage2_pass = v.stage2_reasons.empty();
    return v;
}

}  // namespace harness
