// SPDX-License-Identifier: Apache-2.0
#include "harness/cli/settings.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/util.hpp"
#include "harness/llm/backend.hpp"

namespace harness {

using json = nlohmann::json;

namespace {

const std::vector<std::pair<std::string, json>>& presets() {
    static const std::vector<std::pair<std::string, json>> table{
        {"paper-eval", {{"max_iterations", 50}, {"attempt_temperatures", {0.0, 0.1, 0.1}}}},
        {"paper-eval-30", {{"max_iterations", 30}, {"attempt_temperatures", {0.0, 0.1, 0.1}}}},
        {"paper-eval-100", {{"max_iterations", 100}, {"attempt_temperatures", {0.0, 0.1, 0.1}}}},
        {"paper-sweep", {{"max_iterations", 100}, {"sweep_temperatures", {0.1, 0.4, 0.7, 1.0}}, {"samples", 4}}},
    };
    return table;
}

template <typename T>
T get_key(const json& s, const char* key) {
    try {
        return s.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("setting '{}': {}", key, e.what()));
    }
}

}  // namespace

std::string_view to_string(RunKind kind) { return kind == RunKind::eval ? "run-eval" : "run-sweep"; }

json default_settings(RunKind kind) {
    RunConfig defaults;
    json s = run_config_to_json(defaults);
    s.erase("backend");
    s.erase("output_dir");
    if (kind == RunKind::sweep) {
        SweepSettings sweep;
        s.erase("attempt_temperatures");
        s.erase("retry_policy");
        s["max_iterations"] = 100;
        s["sweep_temperatures"] = sweep.temperatures;
        s["samples"] = sweep.samples;
        s["pass_at_k_estimator"] = to_string(sweep.estimator);
    }
    return s;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : presets()) names.push_back(name);
    return names;
}

json preset_settings(std::string_view name, RunKind kind) {
    for (const auto& [preset, settings] : presets()) {
        if (preset != name) continue;
        const bool sweep_preset = settings.contains("samples");
        if (sweep_preset != (kind == RunKind::sweep)) {
            throw ConfigError(fmt::format("preset '{}' does not apply to {}", name, to_string(kind)));
        }
        return settings;
    }
    throw ConfigError(fmt::format("unknown preset '{}' (known: {})", name, fmt::join(preset_names(), ", ")));
}

json load_config_file(const fs::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const HarnessError& e) {
        throw ConfigError(fmt::format("cannot read config file {}", path.string()));
    }
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ConfigError(fmt::format("config file {} is not a JSON object", path.string()));
    }
    return j;
}

json normalize_settings(json layer) {
    if (auto it = layer.find("backend"); it != layer.end()) {
        BackendDescriptor d = it->is_string() ? parse_backend_descriptor(it->get<std::string>())
                                              : parse_backend_descriptor(it->dump());
        d = pin_backend_descriptor(d);
        json object = d.options;
        object["kind"] = d.kind;
        *it = object;
    }
    for (const char* key : {"suite", "output_dir"}) {
        if (auto it = layer.find(key); it != layer.end() && it->is_string() && !it->get<std::string>().empty()) {
            *it = fs::absolute(it->get<std::string>()).lexically_normal().string();
        }
    }
    return layer;
}

ResolvedRun resolve_run(RunKind kind, const std::vector<json>& layers) {
    json merged = default_settings(kind);
    for (const auto& layer : layers) {
        if (!layer.is_object()) throw ConfigError("settings layer is not an object");
        merged.merge_patch(normalize_settings(layer));
    }
    static const std::vector<std::string> eval_keys{
        "suite", "output_dir", "backend", "max_iterations", "attempt_temperatures", "retry_policy", "parallelism",
        "max_output_tokens", "infra_retries", "strike_limit", "keep_workspaces", "tools"};
    for (const auto& [key, _] : merged.items()) {
        const bool sweep_key = key == "sweep_temperatures" || key == "samples" || key == "pass_at_k_estimator";
        const bool eval_only = key == "attempt_temperatures" || key == "retry_policy";
        const bool known = std::find(eval_keys.begin(), eval_keys.end(), key) != eval_keys.end() || sweep_key;
        if (!known || (sweep_key && kind == RunKind::eval) || (eval_only && kind == RunKind::sweep)) {
            throw ConfigError(fmt::format("unknown setting '{}' for {}", key, to_string(kind)));
        }
    }
    if (!merged.contains("suite")) throw ConfigError("no suite given (--suite)");
    if (!merged.contains("backend")) throw ConfigError("no backend given (--backend)");
    if (!merged.contains("output_dir")) throw ConfigError("no output directory given (--output-dir)");

    ResolvedRun run;
    run.kind = kind;
    run.settings = merged;
    run.suite = get_key<std::string>(merged, "suite");
    json config_json = merged;
    if (kind == RunKind::sweep) {
        run.sweep.temperatures = get_key<std::vector<double>>(merged, "sweep_temperatures");
        run.sweep.samples = get_key<int>(merged, "samples");
        run.sweep.estimator = pass_at_k_estimator_from_string(get_key<std::string>(merged, "pass_at_k_estimator"));
        if (run.sweep.samples < 1) throw ConfigError(fmt::format("samples must be >= 1 (got {})", run.sweep.samples));
        if (run.sweep.temperatures.empty()) throw ConfigError("sweep_temperatures must not be empty");
        config_json["attempt_temperatures"] = run.sweep.temperatures;
    }
    run.config = run_config_from_json(config_json);
    validate(run.config);
    return run;
}

std::vector<std::string> settings_conflicts(const json& pinned, const json& requested) {
    std::vector<std::string> conflicts;
    const json normalized = normalize_settings(requested);
    for (const auto& [key, value] : normalized.items()) {
        auto it = pinned.find(key);
        if (key == "tools" && value.is_object() && it != pinned.end() && it->is_object()) {
            for (const auto& [sub, v] : value.items()) {
                auto jt = it->find(sub);
                if (jt == it->end() || *jt != v) conflicts.push_back(key + "." + sub);
            }
        } else if (it == pinned.end() || *it != value) {
            conflicts.push_back(key);
        }
    }
    return conflicts;
}

}  // namespace harness
