// SPDX-License-Identifier: Apache-2.0
#include "harness/curation/pipeline.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "harness/core/errors.hpp"
#include "harness/core/event_log.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/util.hpp"

namespace harness {

std::vector<StoredAttempt> load_run_attempts(const fs::path& run_dir) {
    std::error_code ec;
    if (!fs::is_directory(run_dir, ec)) throw ConfigError(fmt::format("run directory {} does not exist", run_dir.string()));
    std::vector<StoredAttempt> out;
    for (auto it = fs::recursive_directory_iterator(run_dir); it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_directory()) continue;
        const auto name = it->path().filename().string();
        if (name == "workspace" || name == "verify" || name == ".shell" || name == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        const fs::path summary = it->path() / "summary.json";
        const fs::path events = it->path() / "events.jsonl";
        if (name.rfind("attempt", 0) != 0 || !fs::exists(summary) || !fs::exists(events)) continue;
        it.disable_recursion_pending();
        try {
            StoredAttempt a;
            a.trajectory_id = fs::relative(it->path(), run_dir).generic_string();
            a.record = attempt_summary_from_json(nlohmann::json::parse(read_file(summary)));
            a.record.trajectory = read_event_log(events);
            out.push_back(std::move(a));
        } catch (const std::exception& e) {
            spdlog::warn("skipping {}: {}", it->path().string(), e.what());
        }
    }
    std::sort(out.begin(), out.end(),
              [](const StoredAttempt& a, const StoredAttempt& b) { return a.trajectory_id < b.trajectory_id; });
    return out;
}

CurationResult curate(const std::vector<StoredAttempt>& attempts, int stage, SftFormat format,
                      const std::vector<ToolSpec>& tools) {
    if (stage != 1 && stage != 2) throw ConfigError(fmt::format("stage must be 1 or 2, got {}", stage));
    CurationResult result;
    std::vector<ExportInput> inputs;
    for (const auto& a : attempts) {
        FilterVerdict v = stage2_filter(stage1_filter(a.trajectory_id, a.record.trajectory, a.record),
                                        a.record.verification);
        for (const auto& r : v.stage1_reasons) ++result.stage1_reasons[r];
        for (const auto& r : v.stage2_reasons) ++result.stage2_reasons[r];
        result.stage1_passed += v.stage1_pass ? 1 : 0;
        result.stage2_passed += v.stage2_pass ? 1 : 0;
        const bool selected = stage == 1 ? v.stage1_pass : v.stage2_pass;
        if (selected) inputs.push_back({a.trajectory_id, &a.record.trajectory, v.stage2_pass ? "stage2" : "stage1"});
        result.verdicts.push_back(std::move(v));
    }
    result.exported = export_sft(inputs, format, tools);
    return result;
}

}  // namespace harness
