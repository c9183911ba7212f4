// SPDX-License-Identifier: Apache-2.0
#include "harness/cli/app.hpp"

#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "harness/cli/commands.hpp"
#include "harness/core/errors.hpp"
#include "harness/core/types.hpp"

namespace harness {

namespace {

using json = nlohmann::json;

struct RunFlags {
    std::string suite, backend, output_dir, retry_policy, estimator, preset, config, from_manifest;
    int max_iterations = 0, attempts = 0, parallelism = 0, samples = 0, max_output_tokens = 0;
    int observation_cap = 0, strike_limit = 0, infra_retries = 0, stop_after = 0;
    std::vector<double> temperatures;
    bool resume = false, keep_workspaces = false;
};

void add_common_run_options(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--suite", f.suite, "Instance suite file (JSONL)");
    cmd->add_option("--backend", f.backend,
                    "Backend descriptor: JSON, a JSON file, scripted:<file>, replay:<path> or http:<model>@<url>");
    cmd->add_option("--output-dir", f.output_dir, "Run directory");
    cmd->add_option("--config", f.config, "JSON settings file (flags override it)");
    cmd->add_option("--preset", f.preset, "Built-in settings preset");
    cmd->add_option("--from-manifest", f.from_manifest, "Reuse the settings pinned in a run manifest");
    cmd->add_option("--max-iterations", f.max_iterations, "Assistant turns per attempt");
    cmd->add_option("--parallelism", f.parallelism, "Concurrent attempts");
    cmd->add_option("--max-output-tokens", f.max_output_tokens, "Completion token cap per model call");
    cmd->add_option("--observation-cap", f.observation_cap, "Characters of tool output shown to the model");
    cmd->add_option("--strike-limit", f.strike_limit, "Consecutive malformed turns before agent_error");
    cmd->add_option("--infra-retries", f.infra_retries, "Re-executions of an attempt that hit an infra error");
    cmd->add_flag("--keep-workspaces", f.keep_workspaces, "Keep agent workspaces after each attempt");
    cmd->add_flag("--resume", f.resume, "Continue the run already in --output-dir");
    cmd->add_option("--stop-after-attempts", f.stop_after)->group("");  // test hook
    cmd->add_option("--temperatures", f.temperatures, "Comma-separated temperatures")->delimiter(',');
}

RunRequest to_request(CLI::App* cmd, const RunFlags& f, RunKind kind) {
    RunRequest r;
    json& j = r.flags;
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--suite")) j["suite"] = f.suite;
    if (given("--backend")) j["backend"] = f.backend;
    if (given("--output-dir")) j["output_dir"] = f.output_dir;
    if (given("--max-iterations")) j["max_iterations"] = f.max_iterations;
    if (given("--parallelism")) j["parallelism"] = f.parallelism;
    if (given("--max-output-tokens")) j["max_output_tokens"] = f.max_output_tokens;
    if (given("--strike-limit")) j["strike_limit"] = f.strike_limit;
    if (given("--infra-retries")) j["infra_retries"] = f.infra_retries;
    if (given("--keep-workspaces")) j["keep_workspaces"] = true;
    if (given("--observation-cap")) {
        if (f.observation_cap < 1) throw ConfigError("--observation-cap must be positive");
        j["tools"]["observation_cap"] = f.observation_cap;
    }
    if (kind == RunKind::eval) {
        if (given("--retry-policy")) j["retry_policy"] = f.retry_policy;
        if (given("--attempts") && f.attempts < 1) throw ConfigError(fmt::format("--attempts must be >= 1 (got {})", f.attempts));
        if (given("--temperatures")) {
            if (given("--attempts") && static_cast<int>(f.temperatures.size()) != f.attempts) {
                throw ConfigError(fmt::format("--attempts {} does not match {} --temperatures", f.attempts,
                                              f.temperatures.size()));
            }
            j["attempt_temperatures"] = f.temperatures;
        } else if (given("--attempts")) {
            std::vector<double> schedule{0.0};
            schedule.resize(static_cast<std::size_t>(f.attempts), 0.1);
            j["attempt_temperatures"] = schedule;
        }
    } else {
        if (given("--temperatures")) j["sweep_temperatures"] = f.temperatures;
        if (given("--samples")) j["samples"] = f.samples;
        if (given("--estimator")) j["pass_at_k_estimator"] = f.estimator;
    }
    if (given("--preset")) r.preset = f.preset;
    if (given("--config")) r.config_file = f.config;
    if (given("--from-manifest")) r.from_manifest = f.from_manifest;
    r.resume = f.resume;
    r.stop_after_attempts = f.stop_after;
    return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::atomic<bool>* cancel) {
    CLI::App app{"Evaluation harness for code agents"};
    app.name(args.empty() ? "agent-harness" : args.front());
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

    RunFlags eval_flags;
    auto* eval = app.add_subcommand("run-eval", "Run the iterative evaluation protocol over a suite");
    add_common_run_options(eval, eval_flags);
    eval->add_option("--attempts", eval_flags.attempts, "Schedule length (default 3)");
    eval->add_option("--retry-policy", eval_flags.retry_policy,
                     "unresolved_or_empty_or_error, empty_or_error or unresolved_only");

    RunFlags sweep_flags;
    auto* sweep = app.add_subcommand("run-sweep", "Sample attempts at fixed temperatures and report pass@k");
    add_common_run_options(sweep, sweep_flags);
    sweep->add_option("--samples", sweep_flags.samples, "Attempts per instance and temperature (default 4)");
    sweep->add_option("--estimator", sweep_flags.estimator, "pass@k estimator: unbiased or first_k");

    CurateRequest curate_req;
    std::string curate_format = "function_calling";
    auto* curate = app.add_subcommand("curate", "Filter trajectories of a run and export training samples");
    curate->add_option("--input", curate_req.input, "Run directory")->required();
    curate->add_option("--stage", curate_req.stage, "Filter stage: 1 or 2");
    curate->add_option("--format", curate_format, "function_calling or xml");
    std::string curate_output;
    curate->add_option("--output", curate_output, "Dataset file (JSONL)");

    ReportRequest report_req;
    std::string report_format = "table";
    std::string report_output;
    auto* report = app.add_subcommand("report", "Render a run report; several iterative runs give a budget table");
    report->add_option("inputs", report_req.inputs, "Run directories or report.json files")->required();
    report->add_option("--format", report_format, "structured, table or plot");
    report->add_option("--output", report_output, "Write to this file instead of stdout");

    VerifyRequest verify_req;
    std::string scratch;
    auto* verify = app.add_subcommand("verify", "Check a patch against one instance's tests");
    verify->add_option("--suite", verify_req.suite, "Instance suite file")->required();
    verify->add_option("--instance", verify_req.instance_id, "Instance id")->required();
    verify->add_option("--patch", verify_req.patch, "Patch file")->required();
    verify->add_option("--scratch", scratch, "Scratch directory (removed afterwards)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        spdlog::set_level(spdlog::level::from_str(log_level));
        if (eval->parsed()) return cmd_run(RunKind::eval, to_request(eval, eval_flags, RunKind::eval), cancel);
        if (sweep->parsed()) return cmd_run(RunKind::sweep, to_request(sweep, sweep_flags, RunKind::sweep), cancel);
        if (curate->parsed()) {
            curate_req.format = sft_format_from_string(curate_format);
            if (!curate_output.empty()) curate_req.output = curate_output;
            return cmd_curate(curate_req);
        }
        if (report->parsed()) {
            report_req.format = report_format_from_string(report_format);
            if (!report_output.empty()) report_req.output = report_output;
            return cmd_report(report_req);
        }
        if (verify->parsed()) {
            if (!scratch.empty()) verify_req.scratch = scratch;
            return cmd_verify(verify_req);
        }
    } catch (const ConfigError& e) {
        spdlog::error("configuration error: {}", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        spdlog::error("invalid input: {}", e.what());
        return kExitConfig;
    } catch (const Interrupted& e) {
        spdlog::error("interrupted: {}", e.what());
        return kExitInfra;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitInfra;
    }
    return kExitConfig;
}

}  // namespace harness
