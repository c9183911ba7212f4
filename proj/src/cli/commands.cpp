// SPDX-License-Identifier: Apache-2.0
#include "harness/cli/commands.hpp"

#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

#include "harness/agent/prompt.hpp"
#include "harness/core/errors.hpp"
#include "harness/core/hash.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/suite.hpp"
#include "harness/core/util.hpp"
#include "harness/curation/pipeline.hpp"
#include "harness/eval/protocol.hpp"
#include "harness/eval/runner.hpp"
#include "harness/eval/verify.hpp"
#include "harness/llm/backend.hpp"

namespace harness {

using json = nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;

std::string utc_timestamp() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)));
}

json read_json_file(const fs::path& path, const char* what) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) throw ConfigError(fmt::format("{} {} is not valid JSON", what, path.string()));
    return j;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

void write_reports(const fs::path& out, const EvalReport& report) {
    write_file_atomic(out / "report.json", render_report(report, ReportFormat::structured));
    write_file_atomic(out / "report.md", render_report(report, ReportFormat::table));
    if (!report.sweep.empty()) write_file_atomic(out / "plot.json", render_report(report, ReportFormat::plot));
}

bool final_infra_error(const std::vector<InstanceOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        if (const auto* a = o.final_attempt(); a != nullptr && a->status == AttemptStatus::infra_error) return true;
    }
    return false;
}

}  // namespace

int cmd_run(RunKind kind, const RunRequest& req, std::atomic<bool>* cancel) {
    std::atomic<bool> local_cancel{false};
    if (cancel == nullptr) cancel = &local_cancel;

    std::vector<json> layers;
    if (req.preset) layers.push_back(preset_settings(*req.preset, kind));
    if (req.from_manifest) {
        json m = read_json_file(*req.from_manifest, "manifest");
        if (m.value("command", "") != to_string(kind)) {
            throw ConfigError(fmt::format("manifest {} is not a {} run", req.from_manifest->string(), to_string(kind)));
        }
        layers.push_back(m.at("settings"));
    }
    if (req.config_file) layers.push_back(load_config_file(*req.config_file));
    layers.push_back(req.flags);

    json requested = json::object();
    for (const auto& layer : layers) requested.merge_patch(normalize_settings(layer));
    if (!requested.contains("output_dir")) throw ConfigError("no output directory given (--output-dir)");
    const fs::path out = requested.at("output_dir").get<std::string>();
    const fs::path manifest_path = out / "manifest.json";

    json manifest;
    ResolvedRun run;
    std::error_code ec;
    if (fs::exists(manifest_path, ec)) {
        if (!req.resume) {
            throw ConfigError(fmt::format("{} already holds a run; pass --resume to continue it", out.string()));
        }
        manifest = read_json_file(manifest_path, "manifest");
        if (manifest.value("command", "") != to_string(kind)) {
            throw ConfigError(fmt::format("{} holds a {} run", out.string(), manifest.value("command", "?")));
        }
        if (auto conflicts = settings_conflicts(manifest.at("settings"), requested); !conflicts.empty()) {
            throw ConfigError(fmt::format("resumed run conflicts with its manifest on: {}", fmt::join(conflicts, ", ")));
        }
        run = resolve_run(kind, {manifest.at("settings")});
        manifest["resumed_at"].push_back(utc_timestamp());
    } else {
        run = resolve_run(kind, layers);
    }

    const auto suite = load_suite(run.suite);
    if (suite.empty()) throw ConfigError(fmt::format("suite {} has no instances", run.suite.string()));
    const std::string suite_sha = sha256_file(run.suite);
    if (manifest.is_null()) {
        const std::string started = utc_timestamp();
        manifest = {{"format", kManifestFormat},
                    {"run_id", fmt::format("{}-{}", to_string(kind), sha256_hex(run.settings.dump() + started).substr(0, 12))},
                    {"command", to_string(kind)},
                    {"settings", run.settings},
                    {"suite", {{"path", run.suite.string()}, {"sha256", suite_sha}, {"instances", suite.size()}}},
                    {"status", "running"},
                    {"started_at", started},
                    {"finished_at", nullptr},
                    {"resumed_at", json::array()}};
    } else if (manifest.at("suite").value("sha256", "") != suite_sha) {
        throw ConfigError(fmt::format("suite {} changed since the run started", run.suite.string()));
    }
    fs::create_directories(out);
    manifest["status"] = "running";
    write_json(manifest_path, manifest);

    auto backend = make_backend(run.config.backend);
    std::atomic<int> executed{0};
    ProtocolOptions popts;
    popts.temperatures = run.config.attempt_temperatures;
    popts.predicate = run.config.retry_predicate;
    popts.max_iterations = run.config.max_iterations;
    popts.parallelism = run.config.parallelism;
    popts.infra_retries = run.config.infra_retries;
    popts.cancel = cancel;
    popts.on_attempt = [&](const AttemptRecord&) {
        if (req.stop_after_attempts > 0 && ++executed >= req.stop_after_attempts) cancel->store(true);
    };

    EvalReport report;
    bool infra = false;
    try {
        if (kind == RunKind::eval) {
            AttemptStore store(out / "outcomes.jsonl");
            auto result = run_iterative(suite, popts, make_episode_executor(backend, run.config, out, cancel), store);
            report = std::move(result.report);
            infra = final_infra_error(result.outcomes);
        } else {
            report.mode = "sweep";
            report.total_instances = static_cast<int>(suite.size());
            report.max_iterations = run.config.max_iterations;
            report.pass_at_k_estimator = std::string(to_string(run.sweep.estimator));
            for (double t : run.sweep.temperatures) {
                const fs::path dir = out / "sweep" / ("T" + format_decimal(t));
                fs::create_directories(dir);
                AttemptStore store(dir / "outcomes.jsonl");
                auto sweep = run_sweep(suite, t, run.sweep.samples, popts,
                                       make_episode_executor(backend, run.config, dir, cancel), store);
                report.sweep.push_back(build_sweep_stats(t, sweep.matrix, run.sweep.estimator));
                for (const auto& row : sweep.attempts) {
                    for (const auto& a : row) infra = infra || a.status == AttemptStatus::infra_error;
                }
            }
        }
    } catch (const Interrupted&) {
        manifest["status"] = "aborted";
        write_json(manifest_path, manifest);
        spdlog::warn("run interrupted; completed attempts are kept in {} (continue with --resume)", out.string());
        return kExitInfra;
    }

    write_reports(out, report);
    manifest["status"] = "complete";
    manifest["finished_at"] = utc_timestamp();
    write_json(manifest_path, manifest);
    std::cout << render_report(report, ReportFormat::table) << std::flush;
    if (infra) spdlog::error("some attempts ended in infra_error after retries");
    return infra ? kExitInfra : kExitOk;
}

int cmd_curate(const CurateRequest& req) {
    if (req.stage != 1 && req.stage != 2) throw ConfigError(fmt::format("--stage must be 1 or 2 (got {})", req.stage));
    const auto attempts = load_run_attempts(req.input);
    ToolSettings tool_settings;
    if (fs::exists(req.input / "manifest.json")) {
        json m = read_json_file(req.input / "manifest.json", "manifest");
        tool_settings = run_config_from_json(m.at("settings")).tools;
    }
    const auto result = curate(attempts, req.stage, req.format, default_tools(tool_settings));

    const fs::path output = req.output.value_or(
        req.input / "curated" / fmt::format("stage{}-{}.jsonl", req.stage, to_string(req.format)));
    std::string lines;
    for (const auto& s : result.exported.samples) lines += s.to_json().dump() + "\n";
    if (output.has_parent_path()) fs::create_directories(output.parent_path());
    write_file_atomic(output, lines);

    std::cout << fmt::format("attempts: {}\n", attempts.size());
    std::cout << fmt::format("stage1 passed: {}\n", result.stage1_passed);
    for (const auto& [reason, n] : result.stage1_reasons) std::cout << fmt::format("  {}: {}\n", reason, n);
    std::cout << fmt::format("stage2 passed: {}\n", result.stage2_passed);
    for (const auto& [reason, n] : result.stage2_reasons) std::cout << fmt::format("  {}: {}\n", reason, n);
    std::cout << fmt::format("exported: {} (duplicates dropped: {}, skipped: {})\n", result.exported.samples.size(),
                             result.exported.duplicates, result.exported.skipped.size());
    for (const auto& [id, reason] : result.exported.skipped) std::cout << fmt::format("  skipped {}: {}\n", id, reason);
    std::cout << fmt::format("output: {}\n", output.string()) << std::flush;
    return kExitOk;
}

EvalReport combine_budget_reports(const std::vector<EvalReport>& runs) {
    EvalReport combined;
    combined.mode = "budget";
    for (const auto& r : runs) {
        if (r.mode != "iterative" || r.iterations.empty()) {
            throw ConfigError("only iterative run reports can be combined by budget");
        }
        combined.total_instances = std::max(combined.total_instances, r.total_instances);
        combined.budgets.push_back({r.max_iterations, r.total_instances, r.iterations.back().cumulative_resolved});
    }
    std::stable_sort(combined.budgets.begin(), combined.budgets.end(),
                     [](const BudgetStats& a, const BudgetStats& b) { return a.max_iterations < b.max_iterations; });
    return combined;
}

int cmd_report(const ReportRequest& req) {
    if (req.inputs.empty()) throw ConfigError("report needs at least one run directory");
    std::vector<EvalReport> reports;
    for (const auto& dir : req.inputs) {
        const fs::path file = fs::is_directory(dir) ? dir / "report.json" : dir;
        std::error_code ec;
        if (!fs::exists(file, ec)) throw ConfigError(fmt::format("{} has no report.json", dir.string()));
        reports.push_back(parse_structured_report(read_file(file)));
    }
    const EvalReport report = reports.size() == 1 ? reports.front() : combine_budget_reports(reports);
    const std::string text = render_report(report, req.format);
    if (req.output) {
        write_file_atomic(*req.output, text);
    } else {
        std::cout << text << std::flush;
    }
    return kExitOk;
}

int cmd_verify(const VerifyRequest& req) {
    const auto suite = load_suite(req.suite);
    auto it = std::find_if(suite.begin(), suite.end(), [&](const TaskInstance& t) { return t.id == req.instance_id; });
    if (it == suite.end()) throw ConfigError(fmt::format("instance {} is not in {}", req.instance_id, req.suite.string()));
    std::string patch;
    try {
        patch = read_file(req.patch);
    } catch (const HarnessError&) {
        throw ConfigError(fmt::format("cannot read patch {}", req.patch.string()));
    }
    const fs::path scratch = req.scratch.value_or(fs::temp_directory_path() /
                                                  fmt::format("agent-harness-verify-{}-{}", ::getpid(), now_ms()));
    const VerificationResult v = verify(*it, patch, scratch);
    std::cout << json(v).dump(2) << std::endl;
    return v.resolved ? kExitOk : kExitUnresolved;
}

}  // namespace harness
