// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "harness/core/types.hpp"
#include "harness/eval/report.hpp"
#include "harness/llm/chat.hpp"

namespace harness::testing {

fs::path source_dir();
fs::path toy_dir();
fs::path toy_suite();
fs::path cli_path();

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(std::string_view rel) const { return path_ / rel; }

private:
    fs::path path_;
};

void write_text(const fs::path& path, std::string_view content);

/// Writes `files` under `dir` and returns an instance whose tests run
/// `sh -c` commands taken verbatim from the test ids.
TaskInstance make_instance(const fs::path& dir, const std::string& id, const std::map<std::string, std::string>& files);

/// Short strings biased toward characters that stress escaping: markup,
/// quotes, backslashes, newlines and multi-byte UTF-8.
std::string random_text(std::mt19937_64& rng, std::size_t max_len);

struct RandomTrajectoryOptions {
    bool allow_errors = true;           // error events and malformed arguments
    bool schema_valid_calls = false;    // arguments drawn from the default tool schemas
};

/// A trajectory satisfying check_invariants.
Trajectory random_trajectory(std::mt19937_64& rng, const RandomTrajectoryOptions& options = {});

/// Applies one random edit under `root` (outside .git): line edits,
/// file creation, deletion and renames, binary content, mode flips, and
/// rewrites that leave content unchanged. Returns a short description.
std::string random_edit(std::mt19937_64& rng, const fs::path& root);

/// Small multi-file repository used by the patch properties.
std::map<std::string, std::string> sample_repo_files();

/// Golden file under tests/golden with its license comment line removed.
std::string read_golden(std::string_view name);

/// pass@k by listing every k-subset of n samples (c successes first) and
/// counting the subsets that hold a success.
double pass_at_k_by_enumeration(int n, int c, int k);

/// 500 x 4 success matrices reproducing the temperature table. T=0.1 gives
/// the published row under both estimators; the others under first_k.
std::vector<std::vector<bool>> table2_matrix(double temperature);

/// Outcomes of a 500-instance, 3-iteration run matching the ablation table.
std::vector<InstanceOutcome> table3_outcomes();

/// Iterative run reports at budgets 30, 50 and 100 (resolved 184, 234, 234).
std::vector<EvalReport> table1_runs();

/// Runs the iterative protocol on a random suite with a random outcome
/// table, schedule, predicate and parallelism, and compares every attempt
/// and report row with an independent per-instance model. Returns the
/// first discrepancy.
std::optional<std::string> check_random_protocol(std::uint64_t seed);

/// Patch with one hunk when `changed`, else empty.
std::string fake_patch(bool changed);

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

/// Runs the agent-harness binary.
CliResult run_cli_binary(const std::vector<std::string>& args, int timeout_seconds = 300);

}  // namespace harness::testing
