// SPDX-License-Identifier: Apache-2.0
#include "harness/eval/report.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/util.hpp"

namespace harness {

using json = nlohmann::json;

namespace {

constexpr int kReportFormatVersion = 1;

std::string percent(long numerator, long denominator, int digits) {
    if (denominator <= 0) return format_fixed_half_up(0.0, digits);
    return format_fixed_half_up(100.0 * static_cast<double>(numerator) / static_cast<double>(denominator), digits);
}

std::string temperature_label(double t) { return "T=" + format_decimal(t); }

std::string row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    return out + "\n";
}

}  // namespace

const std::string& InstanceOutcome::final_patch() const {
    static const std::string empty;
    return attempts.empty() ? empty : attempts.back().patch;
}

EvalReport build_iterative_report(const std::vector<InstanceOutcome>& outcomes, const std::vector<double>& temperatures,
                                  int max_iterations, RetryPredicate predicate) {
    EvalReport report;
    report.mode = "iterative";
    report.total_instances = static_cast<int>(outcomes.size());
    report.max_iterations = max_iterations;
    report.retry_predicate = std::string(to_string(predicate));

    int cumulative = 0;
    for (std::size_t i = 0; i < temperatures.size(); ++i) {
        IterationStats s;
        s.iteration = static_cast<int>(i) + 1;
        s.temperature = temperatures[i];
        for (const auto& o : outcomes) {
            for (const auto& a : o.attempts) {
                if (a.attempt_index != s.iteration) continue;
                ++s.instances_run;
                if (a.is_resolved()) ++s.resolved;
                if (a.patch_empty()) ++s.empty_patches;
                if (a.status == AttemptStatus::infra_error) ++s.infra_errors;
            }
        }
        cumulative += s.resolved;
        s.cumulative_resolved = cumulative;
        report.iterations.push_back(s);
    }

    for (const auto& o : outcomes) {
        InstanceSummary summary;
        summary.instance_id = o.instance_id;
        summary.final_attempt_index = o.final_attempt_index();
        summary.final_resolved = o.final_resolved();
        summary.final_patch_empty = o.attempts.empty() || o.attempts.back().patch_empty();
        for (const auto& a : o.attempts) summary.attempt_statuses.emplace_back(to_string(a.status));
        report.instances.push_back(std::move(summary));
    }
    return report;
}

SweepStats build_sweep_stats(double temperature, const std::vector<std::vector<bool>>& matrix,
                             PassAtKEstimator estimator) {
    SweepStats s;
    s.temperature = temperature;
    s.instances = static_cast<int>(matrix.size());
    s.samples = matrix.empty() ? 0 : static_cast<int>(matrix.front().size());
    for (int k = 1; k <= s.samples; ++k) s.pass_at_k.push_back(aggregate_pass_at_k(matrix, k, estimator));
    return s;
}

std::string_view to_string(ReportFormat format) {
    switch (format) {
        case ReportFormat::structured: return "structured";
        case ReportFormat::table: return "table";
        case ReportFormat::plot: return "plot";
    }
    return "structured";
}

ReportFormat report_format_from_string(std::string_view text) {
    if (text == "structured" || text == "json") return ReportFormat::structured;
    if (text == "table" || text == "markdown") return ReportFormat::table;
    if (text == "plot" || text == "plot-data") return ReportFormat::plot;
    throw ConfigError(fmt::format("unknown report format '{}' (expected structured, table or plot)", text));
}

std::string render_budget_table(const std::vector<BudgetStats>& rows) {
    std::string out = row({"Max Iterations", "Resolve Rate (%)"});
    out += "|:---:|:---:|\n";
    for (const auto& r : rows) out += row({std::to_string(r.max_iterations), percent(r.resolved, r.instances, 2)});
    return out;
}

std::string render_sweep_table(const std::vector<SweepStats>& rows) {
    int columns = 0;
    for (const auto& r : rows) columns = std::max(columns, static_cast<int>(r.pass_at_k.size()));
    std::vector<std::string> header{"Temperature"};
    std::string rule = "|:---|";
    for (int k = 1; k <= columns; ++k) {
        header.push_back(fmt::format("Pass@{}", k));
        rule += ":---:|";
    }
    std::string out = row(header) + rule + "\n";
    for (const auto& r : rows) {
        std::vector<std::string> cells{temperature_label(r.temperature)};
        for (int k = 1; k <= columns; ++k) {
            cells.push_back(k <= static_cast<int>(r.pass_at_k.size())
                                ? format_fixed_half_up(100.0 * r.pass_at_k[static_cast<std::size_t>(k - 1)], 1) + "%"
                                : "-");
        }
        out += row(cells);
    }
    return out;
}

std::string render_iteration_table(const std::vector<IterationStats>& rows, int total_instances) {
    std::string out = row({"Iteration", "Instances Run", "Resolution Rate (%)", "Empty Patch Rate (%)"});
    out += "|:---:|:---:|:---:|:---:|\n";
    for (const auto& r : rows) {
        out += row({std::to_string(r.iteration), std::to_string(r.instances_run),
                    percent(r.cumulative_resolved, total_instances, 1), percent(r.empty_patches, r.instances_run, 1)});
    }
    return out;
}

json report_to_json(const EvalReport& r) {
    json iterations = json::array();
    for (const auto& s : r.iterations) {
        iterations.push_back({{"iteration", s.iteration},
                              {"temperature", s.temperature},
                              {"instances_run", s.instances_run},
                              {"resolved", s.resolved},
                              {"cumulative_resolved", s.cumulative_resolved},
                              {"empty_patches", s.empty_patches},
                              {"infra_errors", s.infra_errors},
                              {"resolution_rate", percent(s.cumulative_resolved, r.total_instances, 1)},
                              {"empty_patch_rate", percent(s.empty_patches, s.instances_run, 1)}});
    }
    json sweep = json::array();
    for (const auto& s : r.sweep) {
        sweep.push_back({{"temperature", s.temperature},
                         {"samples", s.samples},
                         {"instances", s.instances},
                         {"pass_at_k", s.pass_at_k}});
    }
    json budgets = json::array();
    for (const auto& b : r.budgets) {
        budgets.push_back({{"max_iterations", b.max_iterations},
                           {"instances", b.instances},
                           {"resolved", b.resolved},
                           {"resolve_rate", percent(b.resolved, b.instances, 2)}});
    }
    json instances = json::array();
    for (const auto& i : r.instances) {
        instances.push_back({{"instance_id", i.instance_id},
                             {"final_attempt_index", i.final_attempt_index},
                             {"final_resolved", i.final_resolved},
                             {"final_patch_empty", i.final_patch_empty},
                             {"attempt_statuses", i.attempt_statuses}});
    }
    return {{"format", kReportFormatVersion},
            {"mode", r.mode},
            {"total_instances", r.total_instances},
            {"max_iterations", r.max_iterations},
            {"retry_predicate", r.retry_predicate},
            {"pass_at_k_estimator", r.pass_at_k_estimator},
            {"iterations", iterations},
            {"sweep", sweep},
            {"budgets", budgets},
            {"instances", instances}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    try {
        if (j.at("format").get<int>() != kReportFormatVersion) throw ValidationError("unsupported report format version");
        r.mode = j.at("mode").get<std::string>();
        r.total_instances = j.at("total_instances").get<int>();
        r.max_iterations = j.at("max_iterations").get<int>();
        r.retry_predicate = j.at("retry_predicate").get<std::string>();
        r.pass_at_k_estimator = j.at("pass_at_k_estimator").get<std::string>();
        for (const auto& s : j.at("iterations")) {
            r.iterations.push_back({s.at("iteration").get<int>(), s.at("temperature").get<double>(),
                                    s.at("instances_run").get<int>(), s.at("resolved").get<int>(),
                                    s.at("cumulative_resolved").get<int>(), s.at("empty_patches").get<int>(),
                                    s.at("infra_errors").get<int>()});
        }
        for (const auto& s : j.at("sweep")) {
            r.sweep.push_back({s.at("temperature").get<double>(), s.at("samples").get<int>(),
                               s.at("instances").get<int>(), s.at("pass_at_k").get<std::vector<double>>()});
        }
        for (const auto& b : j.at("budgets")) {
            r.budgets.push_back(
                {b.at("max_iterations").get<int>(), b.at("instances").get<int>(), b.at("resolved").get<int>()});
        }
        for (const auto& i : j.at("instances")) {
            r.instances.push_back({i.at("instance_id").get<std::string>(), i.at("final_attempt_index").get<int>(),
                                   i.at("final_resolved").get<bool>(), i.at("final_patch_empty").get<bool>(),
                                   i.at("attempt_statuses").get<std::vector<std::string>>()});
        }
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed report: {}", e.what()));
    }
    return r;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::structured: return report_to_json(report).dump(2) + "\n";
        case ReportFormat::table: {
            std::vector<std::string> tables;
            if (!report.budgets.empty()) tables.push_back(render_budget_table(report.budgets));
            if (!report.sweep.empty()) tables.push_back(render_sweep_table(report.sweep));
            if (!report.iterations.empty()) tables.push_back(render_iteration_table(report.iterations, report.total_instances));
            std::string out;
            for (std::size_t i = 0; i < tables.size(); ++i) out += (i ? "\n" : "") + tables[i];
            return out;
        }
        case ReportFormat::plot: {
            json series = json::array();
            for (const auto& s : report.sweep) {
                json points = json::array();
                for (std::size_t k = 0; k < s.pass_at_k.size(); ++k) {
                    points.push_back({{"k", k + 1}, {"pass_at_k", s.pass_at_k[k]}});
                }
                series.push_back({{"label", temperature_label(s.temperature)},
                                  {"temperature", s.temperature},
                                  {"points", points}});
            }
            json plot{{"kind", "pass_at_k"},
                      {"x", {{"field", "k"}, {"label", "K"}, {"scale", "log"}}},
                      {"y", {{"field", "pass_at_k"}, {"label", "Pass@K"}, {"scale", "linear"}}},
                      {"series", series}};
            return plot.dump(2) + "\n";
        }
    }
    throw ConfigError("unknown report format");
}

EvalReport parse_structured_report(std::string_view text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError("report is not valid JSON");
    return report_from_json(j);
}

}  // namespace harness
