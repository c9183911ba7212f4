// SPDX-License-Identifier: Apache-2.0
#include "harness/eval/verify.hpp"

#include <chrono>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "harness/core/errors.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/subprocess.hpp"
#include "harness/sandbox/vcs.hpp"
#include "harness/sandbox/workspace.hpp"

namespace harness {

namespace {

constexpr std::size_t kOutputTail = 2000;

TestResult run_test(const Workspace& ws, const TaskInstance& instance, const std::string& test_id,
                    const std::atomic<bool>* cancel) {
    ProcessOptions opts;
    opts.argv = {"bash", "--noprofile", "--norc", "-c", test_command(instance, test_id)};
    opts.cwd = ws.root;
    opts.env = sandbox_environment(ws);
    opts.timeout = std::chrono::seconds(instance.timeout_seconds);
    opts.cancel = cancel;
    opts.capture_limit = kOutputTail;
    ProcessResult r = run_process(opts);
    if (r.cancelled) throw Interrupted("verification cancelled");

    TestResult t;
    t.test_id = test_id;
    t.exit_code = r.exit_code;
    t.timed_out = r.timed_out;
    t.passed = r.ok();
    t.output_tail = to_valid_utf8(r.output.size() > kOutputTail ? r.output.substr(r.output.size() - kOutputTail) : r.output);
    return t;
}

std::vector<std::string> failing(const std::vector<TestResult>& results) {
    std::vector<std::string> ids;
    for (const auto& t : results) {
        if (!t.passed) ids.push_back(t.timed_out ? t.test_id + " (timed out)" : t.test_id);
    }
    return ids;
}

}  // namespace

std::string test_command(const TaskInstance& instance, std::string_view test_id) {
    std::string cmd = instance.test_command_template;
    const std::string quoted = shell_quote(test_id);
    for (auto pos = cmd.find(kTestPlaceholder); pos != std::string::npos;
         pos = cmd.find(kTestPlaceholder, pos + quoted.size())) {
        cmd.replace(pos, kTestPlaceholder.size(), quoted);
    }
    return cmd;
}

VerificationResult verify(const TaskInstance& instance, std::string_view patch, const fs::path& scratch_dir,
                          const std::atomic<bool>* cancel) {
    Workspace ws = provision(instance, 0, scratch_dir);
    struct Cleanup {
        const fs::path& dir;
        ~Cleanup() {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    } cleanup{scratch_dir};

    VerificationResult v;
    ApplyResult applied = apply_patch(ws.root, patch);
    if (!applied.ok) {
        v.apply_failed = true;
        v.detail = "apply_failed: " + to_valid_utf8(applied.message);
        return v;
    }
    for (const auto& id : instance.fail_to_pass) v.fail_to_pass.push_back(run_test(ws, instance, id, cancel));
    for (const auto& id : instance.pass_to_pass) v.pass_to_pass.push_back(run_test(ws, instance, id, cancel));

    const auto still_failing = failing(v.fail_to_pass);
    const auto regressed = failing(v.pass_to_pass);
    v.resolved = still_failing.empty() && regressed.empty();
    std::vector<std::string> parts;
    if (!still_failing.empty()) parts.push_back(fmt::format("fail_to_pass still failing: {}", fmt::join(still_failing, ", ")));
    if (!regressed.empty()) parts.push_back(fmt::format("pass_to_pass regressed: {}", fmt::join(regressed, ", ")));
    v.detail = parts.empty() ? "all tests passed" : fmt::format("{}", fmt::join(parts, "; "));
    return v;
}

}  // namespace harness
