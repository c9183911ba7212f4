// SPDX-License-Identifier: Apache-2.0
// Acceptance checks, one PASS/FAIL line each. Exit status is the number of
// failures (0 when everything passes).

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "harness/agent/prompt.hpp"
#include "harness/cli/commands.hpp"
#include "harness/core/patch.hpp"
#include "harness/core/util.hpp"
#include "harness/curation/pipeline.hpp"
#include "harness/eval/pass_at_k.hpp"
#include "harness/eval/report.hpp"
#include "harness/sandbox/vcs.hpp"
#include "harness/sandbox/workspace.hpp"
#include "test_support.hpp"

namespace {

using namespace harness;
using json = nlohmann::json;
using Outcome = std::optional<std::string>;  // failure detail
namespace t = harness::testing;

struct Criterion {
    int id;
    std::string name;
    int time_limit_seconds;
    std::function<Outcome()> check;
};

std::string agent(const char* name) { return "scripted:" + (t::toy_dir() / "agents" / (std::string(name) + ".json")).string(); }

Outcome cli(const std::vector<std::string>& args, int expected_exit = 0) {
    std::vector<std::string> full{"--log-level", "warn"};
    full.insert(full.end(), args.begin(), args.end());
    const auto r = t::run_cli_binary(full, 600);
    if (r.exit_code != expected_exit) {
        return fmt::format("agent-harness {} exited {} (want {}): {}", args.front(), r.exit_code, expected_exit,
                           r.output.substr(0, 400));
    }
    return std::nullopt;
}

std::vector<std::string> eval_args(const fs::path& out, const char* agent_name) {
    return {"run-eval", "--suite", t::toy_suite().string(), "--backend", agent(agent_name), "--output-dir", out.string()};
}

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& more) {
    a.insert(a.end(), more.begin(), more.end());
    return a;
}

std::vector<std::string> toy_ids() {
    std::vector<std::string> ids;
    std::ifstream in(t::toy_suite());
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ids.push_back(json::parse(line).at("id").get<std::string>());
    }
    return ids;
}

std::vector<json> jsonl(const fs::path& p) {
    std::vector<json> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(json::parse(line));
    }
    return out;
}

fs::path attempt_dir(const fs::path& run, const std::string& id, int k) {
    return run / "instances" / id / ("attempt" + std::to_string(k));
}

// 1
Outcome pass_at_k_matches_enumeration() {
    if (std::abs(pass_at_k({5, 2, 2}) - 0.7) > 1e-12) return "pass@2 with n=5, c=2 is not 0.7";
    for (int n = 1; n <= 12; ++n) {
        for (int c = 0; c <= n; ++c) {
            for (int k = 1; k <= n; ++k) {
                const double got = pass_at_k({n, c, k});
                const double want = t::pass_at_k_by_enumeration(n, c, k);
                if (std::abs(got - want) > 1e-12) return fmt::format("n={} c={} k={}: {} vs {}", n, c, k, got, want);
            }
        }
    }
    return std::nullopt;
}

// 2
Outcome iteration_table_golden() {
    const auto report = build_iterative_report(t::table3_outcomes(), {0.0, 0.1, 0.1}, 50,
                                               RetryPredicate::unresolved_or_empty_or_error);
    const std::string got = render_iteration_table(report.iterations, report.total_instances);
    const std::string want = t::read_golden("table3_iterative_ablation.md");
    if (got != want) return "rendered table differs:\n" + got;
    return std::nullopt;
}

// 3
Outcome budget_and_temperature_goldens() {
    const std::string budget = render_report(combine_budget_reports(t::table1_runs()), ReportFormat::table);
    if (budget != t::read_golden("table1_max_iterations.md")) return "budget table differs:\n" + budget;
    std::vector<SweepStats> rows;
    for (double temp : {0.1, 0.4, 0.7, 1.0}) {
        rows.push_back(build_sweep_stats(temp, t::table2_matrix(temp), PassAtKEstimator::first_k));
    }
    const std::string sweep = render_sweep_table(rows);
    if (sweep != t::read_golden("table2_temperature_scaling.md")) return "temperature table differs:\n" + sweep;
    return std::nullopt;
}

// 4
Outcome randomized_protocol() {
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        if (auto problem = t::check_random_protocol(seed)) return problem;
    }
    return std::nullopt;
}

// Toy suite reduced to its first instance, repo path made absolute.
fs::path single_instance_suite(const fs::path& dir) {
    std::ifstream in(t::toy_suite());
    std::string line;
    std::getline(in, line);
    json j = json::parse(line);
    j["repo_source"] = (t::toy_dir() / j.at("repo_source").get<std::string>()).string();
    const fs::path file = dir / "one.jsonl";
    write_file_atomic(file, j.dump() + "\n");
    return file;
}

// 5
Outcome request_temperatures() {
    t::TempDir tmp;
    const fs::path out = tmp / "run";
    const fs::path suite = single_instance_suite(tmp.path());
    if (auto e = cli({"run-eval", "--suite", suite.string(), "--backend", agent("empty"), "--output-dir", out.string()})) {
        return e;
    }
    const std::vector<double> schedule{0.0, 0.1, 0.1};
    for (const auto& id : std::vector<std::string>{toy_ids().front()}) {
        for (int k = 1; k <= 3; ++k) {
            const fs::path file = attempt_dir(out, id, k) / "requests.jsonl";
            const auto lines = jsonl(file);
            if (lines.empty()) return fmt::format("{} has no requests", file.string());
            for (const auto& l : lines) {
                if (l.at("request").at("temperature").get<double>() != schedule[static_cast<std::size_t>(k - 1)]) {
                    return fmt::format("{}: temperature {}", file.string(), l["request"]["temperature"].dump());
                }
            }
            if (k == 1 && read_file(file).find("\"temperature\":0.0") == std::string::npos) {
                return fmt::format("{} does not carry \"temperature\":0.0 verbatim", file.string());
            }
        }
        if (fs::exists(attempt_dir(out, id, 4))) return fmt::format("{} ran a fourth attempt", id);
    }
    return std::nullopt;
}

// 6
Outcome iteration_budgets_halt() {
    t::TempDir tmp;
    for (const auto& [preset, budget] : std::vector<std::pair<std::string, int>>{
             {"paper-eval-30", 30}, {"paper-eval", 50}, {"paper-eval-100", 100}}) {
        const fs::path out = tmp / preset;
        if (auto e = cli(with(eval_args(out, "never_finish"), {"--preset", preset, "--attempts", "1"}))) return e;
        for (const auto& id : toy_ids()) {
            const auto summary = json::parse(read_file(attempt_dir(out, id, 1) / "summary.json"));
            if (summary.at("status") != "iteration_limit" || summary.at("assistant_turns") != budget) {
                return fmt::format("{} {}: status {} after {} turns", preset, id, summary["status"].dump(),
                                   summary["assistant_turns"].dump());
            }
            const auto requests = jsonl(attempt_dir(out, id, 1) / "requests.jsonl").size();
            if (requests != static_cast<std::size_t>(budget)) {
                return fmt::format("{} {}: {} model calls", preset, id, requests);
            }
        }
    }
    return std::nullopt;
}

// 7
Outcome toy_suite_outcomes() {
    t::TempDir tmp;
    if (auto e = cli(eval_args(tmp / "fixture", "fixture"))) return e;
    if (auto e = cli(eval_args(tmp / "empty", "empty"))) return e;
    const auto fixture = parse_structured_report(read_file(tmp / "fixture" / "report.json"));
    const auto empty = parse_structured_report(read_file(tmp / "empty" / "report.json"));
    const int n = fixture.total_instances;
    if (n != 6 || fixture.iterations.back().cumulative_resolved != n) return "fixture agent did not resolve every instance";
    if (fixture.iterations[1].instances_run != 0) return "resolved instances were retried";
    if (empty.iterations.back().cumulative_resolved != 0) return "empty agent resolved something";
    for (const auto& row : empty.iterations) {
        if (row.instances_run != n || row.empty_patches != n) {
            return fmt::format("empty agent iteration {}: {} run, {} empty", row.iteration, row.instances_run,
                               row.empty_patches);
        }
    }
    return std::nullopt;
}

// 8
Outcome patch_round_trips() {
    std::mt19937_64 rng(8);
    t::TempDir tmp;
    const TaskInstance inst = t::make_instance(tmp / "src", "p", t::sample_repo_files());
    for (int round = 0; round < 200; ++round) {
        const fs::path dir = tmp / ("r" + std::to_string(round));
        const Workspace w = provision(inst, 1, dir / "edit");
        std::string script;
        for (int i = std::uniform_int_distribution<int>(0, 4)(rng); i > 0; --i) script += t::random_edit(rng, w.root) + "; ";
        const std::string patch = extract_patch(w);
        const bool unchanged = tree_snapshot(w.root) == tree_snapshot(inst.repo_source);
        if (is_empty_patch(patch) != unchanged) return fmt::format("round {}: emptiness wrong after [{}]", round, script);
        const Workspace fresh = provision(inst, 1, dir / "apply");
        const ApplyResult applied = apply_patch(fresh.root, patch);
        if (!applied.ok) return fmt::format("round {}: apply failed after [{}]: {}", round, script, applied.message);
        if (tree_snapshot(fresh.root) != tree_snapshot(w.root)) {
            return fmt::format("round {}: trees differ after [{}]", round, script);
        }
        fs::remove_all(dir);
    }
    return std::nullopt;
}

// 9
Outcome determinism_and_resume() {
    t::TempDir tmp;
    for (const char* run : {"a", "b"}) {
        if (auto e = cli(with(eval_args(tmp / run, "fixture"), {"--parallelism", run[0] == 'a' ? "1" : "3"}))) return e;
    }
    if (read_file(tmp / "a" / "report.json") != read_file(tmp / "b" / "report.json")) {
        return "report.json differs between identical runs";
    }
    if (auto e = cli(eval_args(tmp / "whole", "empty"))) return e;
    if (auto e = cli(with(eval_args(tmp / "split", "empty"), {"--stop-after-attempts", "7"}), kExitInfra)) return e;
    if (fs::exists(tmp / "split" / "report.json")) return "interrupted run wrote a report";
    if (jsonl(tmp / "split" / "outcomes.jsonl").size() != 7) return "interrupted run did not keep 7 attempts";
    if (auto e = cli(with(eval_args(tmp / "split", "empty"), {"--resume"}))) return e;
    if (read_file(tmp / "split" / "report.json") != read_file(tmp / "whole" / "report.json")) {
        return "resumed report differs from the uninterrupted one";
    }
    if (jsonl(tmp / "split" / "outcomes.jsonl").size() != 18) return "resume re-ran completed attempts";
    return std::nullopt;
}

// 10
Outcome curation_properties() {
    t::TempDir tmp;
    if (auto e = cli(eval_args(tmp / "fixture", "fixture"))) return e;
    if (auto e = cli(eval_args(tmp / "empty", "empty"))) return e;
    const auto tools = default_tools(ToolSettings{});
    int stage1 = 0;
    for (const char* run : {"fixture", "empty"}) {
        const auto attempts = load_run_attempts(tmp / run);
        const auto result = curate(attempts, 2, SftFormat::function_calling, tools);
        for (const auto& v : result.verdicts) {
            if (v.stage2_pass && !v.stage1_pass) return fmt::format("{} passes stage 2 but not stage 1", v.trajectory_id);
            stage1 += v.stage1_pass;
        }
    }
    if (stage1 == 0) return "no trajectory passed stage 1";

    std::mt19937_64 rng(10);
    t::RandomTrajectoryOptions clean;
    clean.allow_errors = false;
    clean.schema_valid_calls = true;
    for (int i = 0; i < 1000; ++i) {
        const auto traj = t::random_trajectory(rng, clean);
        const auto expected = action_sequence(traj);
        for (auto format : {SftFormat::function_calling, SftFormat::xml_pseudo_scaffold}) {
            const auto conv = json::parse(render_conversation(traj, format, tools).dump());
            if (parse_conversation(conv, format, tools) != expected) {
                return fmt::format("trajectory {} does not round-trip as {}", i, to_string(format));
            }
        }
    }
    return std::nullopt;
}

}  // namespace

int main() {
    spdlog::set_level(spdlog::level::off);
    const std::vector<Criterion> criteria{
        {1, "pass@k equals exhaustive subset enumeration", 1, pass_at_k_matches_enumeration},
        {2, "iteration ablation table matches golden", 1, iteration_table_golden},
        {3, "max-iterations and temperature tables match goldens", 1, budget_and_temperature_goldens},
        {4, "1000 randomized protocol runs keep the protocol invariants", 10, randomized_protocol},
        {5, "request log of a 3-attempt instance carries 0.0/0.1/0.1", 5, request_temperatures},
        {6, "never-finishing agent halts at exactly 30/50/100 turns", 30, iteration_budgets_halt},
        {7, "toy suite: fixture agent 100% resolved, empty agent 0% with all patches empty", 120, toy_suite_outcomes},
        {8, "200 random edit scripts round-trip through patches", 120, patch_round_trips},
        {9, "reruns are byte-identical and resume equals an uninterrupted run", 120, determinism_and_resume},
        {10, "stage 2 within stage 1; 1000 trajectories round-trip in both formats", 30, curation_properties},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!outcome && seconds > c.time_limit_seconds) {
            outcome = fmt::format("took {:.1f}s, limit {}s", seconds, c.time_limit_seconds);
        }
        failures += outcome.has_value();
        std::cout << fmt::format("{} AC{:<2} {} ({:.1f}s)", outcome ? "FAIL" : "PASS", c.id, c.name, seconds);
        if (outcome) std::cout << ": " << *outcome;
        std::cout << std::endl;
    }
    std::cout << fmt::format("{}/{} acceptance criteria passed", criteria.size() - static_cast<std::size_t>(failures),
                             criteria.size())
              << std::endl;
    return failures;
}
