// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/cli/settings.hpp"
#include "harness/curation/export.hpp"
#include "harness/eval/report.hpp"

namespace harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUnresolved = 1;  // verify: patch does not resolve the instance
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfra = 3;       // infrastructure failure or interrupted run

struct RunRequest {
    std::optional<std::string> preset;
    std::optional<fs::path> config_file;
    std::optional<fs::path> from_manifest;  // reuse a manifest's settings as the config layer
    nlohmann::json flags = nlohmann::json::object();
    bool resume = false;
    int stop_after_attempts = 0;            // test hook: cancel after this many new attempts
};

/// run-eval and run-sweep. Writes manifest.json, outcomes.jsonl and
/// report.{json,md}, plus plot.json for sweeps, under the output directory.
int cmd_run(RunKind kind, const RunRequest& request, std::atomic<bool>* cancel);

struct CurateRequest {
    fs::path input;
    int stage = 2;
    SftFormat format = SftFormat::function_calling;
    std::optional<fs::path> output;  // default <input>/curated/stage<k>-<format>.jsonl
};
int cmd_curate(const CurateRequest& request);

struct ReportRequest {
    std::vector<fs::path> inputs;  // one run directory, or several iterative runs to combine by budget
    ReportFormat format = ReportFormat::table;
    std::optional<fs::path> output;
};
int cmd_report(const ReportRequest& request);

struct VerifyRequest {
    fs::path suite;
    std::string instance_id;
    fs::path patch;
    std::optional<fs::path> scratch;
};
int cmd_verify(const VerifyRequest& request);

/// Combines completed iterative runs into max-iterations rows.
EvalReport combine_budget_reports(const std::vector<EvalReport>& runs);

}  // namespace harness
