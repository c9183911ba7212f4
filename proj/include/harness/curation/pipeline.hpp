// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "harness/curation/export.hpp"
#include "harness/curation/filters.hpp"

namespace harness {

struct StoredAttempt {
    std::string trajectory_id;  // attempt directory relative to the run directory
    AttemptRecord record;       // record.trajectory holds the events
};

/// Every attempt directory (summary.json + events.jsonl) below `run_dir`,
/// sorted by trajectory id. Workspaces and verification scratch copies are
/// not descended into. Throws ConfigError when run_dir is not a directory.
std::vector<StoredAttempt> load_run_attempts(const fs::path& run_dir);

struct CurationResult {
    std::vector<FilterVerdict> verdicts;
    int stage1_passed = 0;
    int stage2_passed = 0;
    std::map<std::string, int> stage1_reasons;
    std::map<std::string, int> stage2_reasons;
    ExportResult exported;
};

/// Filters every attempt and exports those passing `stage` (1 or 2).
CurationResult curate(const std::vector<StoredAttempt>& attempts, int stage, SftFormat format,
                      const std::vector<ToolSpec>& tools);

}  // namespace harness
