// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"
#include "harness/eval/pass_at_k.hpp"

namespace harness {

/// All attempts of one instance under the iterative protocol, in schedule
/// order. The final outcome is the last executed attempt.
struct InstanceOutcome {
    std::string instance_id;
    std::vector<AttemptRecord> attempts;

    const AttemptRecord* final_attempt() const { return attempts.empty() ? nullptr : &attempts.back(); }
    int final_attempt_index() const { return attempts.empty() ? 0 : attempts.back().attempt_index; }
    const std::string& final_patch() const;
    bool final_resolved() const { return !attempts.empty() && attempts.back().is_resolved(); }
};

/// One protocol iteration (one row of the ablation table).
struct IterationStats {
    int iteration = 1;
    double temperature = 0.0;
    int instances_run = 0;
    int resolved = 0;             // resolved by this iteration's attempts
    int cumulative_resolved = 0;  // over the whole suite, after this iteration
    int empty_patches = 0;        // among this iteration's attempts
    int infra_errors = 0;

    bool operator==(const IterationStats&) const = default;
};

/// pass@1..pass@n at one temperature.
struct SweepStats {
    double temperature = 0.0;
    int samples = 0;
    int instances = 0;
    std::vector<double> pass_at_k;  // index k-1, fractions in [0, 1]

    bool operator==(const SweepStats&) const = default;
};

/// Final resolve count of a run at one max-iterations budget.
struct BudgetStats {
    int max_iterations = 0;
    int instances = 0;
    int resolved = 0;

    bool operator==(const BudgetStats&) const = default;
};

struct InstanceSummary {
    std::string instance_id;
    int final_attempt_index = 0;
    bool final_resolved = false;
    bool final_patch_empty = true;
    std::vector<std::string> attempt_statuses;  // per executed attempt

    bool operator==(const InstanceSummary&) const = default;
};

/// Aggregate over a run. Holds no wall-clock data so reruns of a
/// deterministic backend render byte-identical reports.
struct EvalReport {
    std::string mode = "iterative";  // iterative, sweep or budget
    int total_instances = 0;
    int max_iterations = 0;
    std::string retry_predicate;
    std::string pass_at_k_estimator;
    std::vector<IterationStats> iterations;
    std::vector<SweepStats> sweep;
    std::vector<BudgetStats> budgets;
    std::vector<InstanceSummary> instances;

    bool operator==(const EvalReport&) const = default;
};

/// Per-iteration rows from instance outcomes. `temperatures` is the
/// schedule; iteration i collects attempts with attempt_index == i.
EvalReport build_iterative_report(const std::vector<InstanceOutcome>& outcomes, const std::vector<double>& temperatures,
                                  int max_iterations, RetryPredicate predicate);

/// Sweep row from a success matrix (instances x samples).
SweepStats build_sweep_stats(double temperature, const std::vector<std::vector<bool>>& matrix,
                             PassAtKEstimator estimator);

enum class ReportFormat { structured, table, plot };
std::string_view to_string(ReportFormat format);
/// Accepts structured|json, table|markdown, plot|plot-data. Throws ConfigError otherwise.
ReportFormat report_format_from_string(std::string_view text);

std::string render_report(const EvalReport& report, ReportFormat format);

/// Inverse of the structured rendering. Throws ValidationError.
EvalReport parse_structured_report(std::string_view text);

/// Individual table layouts (markdown pipe tables, trailing newline).
std::string render_budget_table(const std::vector<BudgetStats>& rows);       // max iterations vs resolve rate
std::string render_sweep_table(const std::vector<SweepStats>& rows);         // temperature vs pass@1..n
std::string render_iteration_table(const std::vector<IterationStats>& rows, int total_instances);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

}  // namespace harness
