// SPDX-License-Identifier: Apache-2.0
#pragma once

// Run settings are a JSON object layered as
//   defaults < preset < config file < flags
// and pinned into the run manifest. Keys:
//   suite, output_dir, backend (descriptor string or object), max_iterations,
//   attempt_temperatures, retry_policy, parallelism, max_output_tokens,
//   infra_retries, strike_limit, keep_workspaces,
//   tools {observation_cap, default_bash_timeout, max_bash_timeout},
//   sweep_temperatures, samples, pass_at_k_estimator   (run-sweep only)

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"
#include "harness/eval/pass_at_k.hpp"

namespace harness {

enum class RunKind { eval, sweep };
std::string_view to_string(RunKind kind);

struct SweepSettings {
    std::vector<double> temperatures{0.1, 0.4, 0.7, 1.0};
    int samples = 4;
    PassAtKEstimator estimator = PassAtKEstimator::unbiased;
};

struct ResolvedRun {
    RunKind kind = RunKind::eval;
    fs::path suite;
    RunConfig config;
    SweepSettings sweep;
    nlohmann::json settings;  // the merged layers, backend pinned
};

nlohmann::json default_settings(RunKind kind);

/// Names accepted by preset_settings.
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names or a preset that does not fit `kind`.
nlohmann::json preset_settings(std::string_view name, RunKind kind);

/// Reads a JSON config file. Throws ConfigError.
nlohmann::json load_config_file(const fs::path& path);

/// Replaces a backend descriptor string by its pinned object form.
nlohmann::json normalize_settings(nlohmann::json layer);

/// Merges `layers` in order onto the defaults, then validates.
/// Throws ConfigError naming the offending key.
ResolvedRun resolve_run(RunKind kind, const std::vector<nlohmann::json>& layers);

/// Keys (as JSON pointers) whose value in `requested` differs from `pinned`.
std::vector<std::string> settings_conflicts(const nlohmann::json& pinned, const nlohmann::json& requested);

}  // namespace harness
