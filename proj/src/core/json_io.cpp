// SPDX-License-Identifier: Apache-2.0
#include "harness/core/json_io.hpp"

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/hash.hpp"
#include "harness/core/patch.hpp"
#include "harness/core/util.hpp"

namespace harness {

using nlohmann::json;

namespace {

std::optional<int> optional_int(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<int>();
}

// SWE-bench style suites store test lists as JSON-encoded strings.
std::vector<std::string> string_list(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (it->is_string()) {
        auto parsed = json::parse(it->get<std::string>());
        return parsed.get<std::vector<std::string>>();
    }
    return it->get<std::vector<std::string>>();
}

}  // namespace

void to_json(json& j, const TokenUsage& u) {
    j = json{{"prompt_tokens", u.prompt_tokens}, {"completion_tokens", u.completion_tokens}};
}

void from_json(const json& j, TokenUsage& u) {
    u.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
    u.completion_tokens = j.value("completion_tokens", std::int64_t{0});
}

void to_json(json& j, const Event& e) {
    j = json{{"index", e.index}, {"kind", to_string(e.kind)}, {"turn", e.turn}, {"timestamp_ms", e.timestamp_ms}};
    if (e.usage) j["usage"] = *e.usage;
    json payload = std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, TextPayload>) {
                return json{{"text", p.text}};
            } else if constexpr (std::is_same_v<P, ToolCallPayload>) {
                return json{{"call_id", p.call_id}, {"name", p.name}, {"arguments", p.arguments}};
            } else if constexpr (std::is_same_v<P, ObservationPayload>) {
                json o{{"call_id", p.call_id},     {"content", p.content},     {"truncated", p.truncated},
                       {"timed_out", p.timed_out}, {"rejected", p.rejected}, {"exit_code", nullptr}};
                if (p.exit_code) o["exit_code"] = *p.exit_code;
                return o;
            } else {
                return json{{"call_id", p.call_id}, {"arguments", p.arguments}};
            }
        },
        e.payload);
    j["payload"] = std::move(payload);
}

void from_json(const json& j, Event& e) {
    e.index = j.at("index").get<std::size_t>();
    e.kind = event_kind_from_string(j.at("kind").get<std::string>());
    e.turn = j.value("turn", 0);
    e.timestamp_ms = j.value("timestamp_ms", std::int64_t{0});
    e.usage.reset();
    if (auto it = j.find("usage"); it != j.end() && !it->is_null()) e.usage = it->get<TokenUsage>();
    const json& p = j.at("payload");
    switch (e.kind) {
        case EventKind::tool_call:
            e.payload = ToolCallPayload{p.at("call_id").get<std::string>(), p.at("name").get<std::string>(),
                                        p.at("arguments").get<std::string>()};
            break;
        case EventKind::tool_observation: {
            ObservationPayload o;
            o.call_id = p.at("call_id").get<std::string>();
            o.content = p.at("content").get<std::string>();
            o.exit_code = optional_int(p, "exit_code");
            o.truncated = p.value("truncated", false);
            o.timed_out = p.value("timed_out", false);
            o.rejected = p.value("rejected", false);
            e.payload = std::move(o);
            break;
        }
        case EventKind::finish:
            e.payload = FinishPayload{p.at("call_id").get<std::string>(), p.at("arguments").get<std::string>()};
            break;
        default:
            e.payload = TextPayload{p.at("text").get<std::string>()};
            break;
    }
}

void to_json(json& j, const TestResult& t) {
    j = json{{"test_id", t.test_id}, {"passed", t.passed},           {"exit_code", nullptr},
             {"timed_out", t.timed_out}, {"output_tail", t.output_tail}};
    if (t.exit_code) j["exit_code"] = *t.exit_code;
}

void from_json(const json& j, TestResult& t) {
    t.test_id = j.at("test_id").get<std::string>();
    t.passed = j.at("passed").get<bool>();
    t.exit_code = optional_int(j, "exit_code");
    t.timed_out = j.value("timed_out", false);
    t.output_tail = j.value("output_tail", std::string{});
}

void to_json(json& j, const VerificationResult& v) {
    j = json{{"resolved", v.resolved},
             {"apply_failed", v.apply_failed},
             {"fail_to_pass", v.fail_to_pass},
             {"pass_to_pass", v.pass_to_pass},
             {"detail", v.detail}};
}

void from_json(const json& j, VerificationResult& v) {
    v.resolved = j.at("resolved").get<bool>();
    v.apply_failed = j.value("apply_failed", false);
    v.fail_to_pass = j.value("fail_to_pass", std::vector<TestResult>{});
    v.pass_to_pass = j.value("pass_to_pass", std::vector<TestResult>{});
    v.detail = j.value("detail", std::string{});
}

TaskInstance task_instance_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("suite record is not a JSON object");
    TaskInstance t;
    try {
        t.id = j.at("id").get<std::string>();
        t.repo_source = j.at("repo_source").get<std::string>();
        t.base_revision = j.value("base_revision", std::string{});
        t.problem_statement = j.value("problem_statement", std::string{});
        t.setup_commands = string_list(j, "setup_commands");
        t.fail_to_pass = string_list(j, "fail_to_pass");
        t.pass_to_pass = string_list(j, "pass_to_pass");
        t.test_command_template = j.at("test_command_template").get<std::string>();
        t.timeout_seconds = j.value("timeout_seconds", 60);
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed suite record: {}", e.what()));
    }
    return t;
}

json to_json(const TaskInstance& t) {
    return json{{"id", t.id},
                {"repo_source", t.repo_source.string()},
                {"base_revision", t.base_revision},
                {"problem_statement", t.problem_statement},
                {"setup_commands", t.setup_commands},
                {"fail_to_pass", t.fail_to_pass},
                {"pass_to_pass", t.pass_to_pass},
                {"test_command_template", t.test_command_template},
                {"timeout_seconds", t.timeout_seconds}};
}

json attempt_summary_to_json(const AttemptRecord& r) {
    json j{{"instance_id", r.instance_id},
           {"attempt_index", r.attempt_index},
           {"temperature", r.temperature},
           {"max_iterations", r.max_iterations},
           {"assistant_turns", r.assistant_turns},
           {"rejected_calls", r.rejected_calls},
           {"status", to_string(r.status)},
           {"resolved", nullptr},
           {"patch", nullptr},
           {"patch_empty", r.patch_empty()},
           {"verification", nullptr},
           {"duration_seconds", r.duration_seconds},
           {"error_detail", r.error_detail},
           {"token_usage", r.trajectory.token_usage()}};
    if (r.resolved != Resolution::not_evaluated) j["resolved"] = r.resolved == Resolution::resolved;
    if (is_valid_utf8(r.patch)) {
        j["patch"] = r.patch;
    } else {
        j.erase("patch");
        j["patch_base64"] = base64_encode(r.patch);
    }
    if (r.verification) j["verification"] = *r.verification;
    return j;
}

AttemptRecord attempt_summary_from_json(const json& j) {
    AttemptRecord r;
    try {
        r.instance_id = j.at("instance_id").get<std::string>();
        r.attempt_index = j.at("attempt_index").get<int>();
        r.temperature = j.at("temperature").get<double>();
        r.max_iterations = j.value("max_iterations", 0);
        r.assistant_turns = j.value("assistant_turns", 0);
        r.rejected_calls = j.value("rejected_calls", 0);
        r.status = attempt_status_from_string(j.at("status").get<std::string>());
        const json& resolved = j.at("resolved");
        r.resolved = resolved.is_null() ? Resolution::not_evaluated
                     : resolved.get<bool>() ? Resolution::resolved
                                            : Resolution::unresolved;
        if (auto it = j.find("patch_base64"); it != j.end()) {
            r.patch = base64_decode(it->get<std::string>());
        } else {
            r.patch = j.value("patch", std::string{});
        }
        if (auto it = j.find("verification"); it != j.end() && !it->is_null()) {
            r.verification = it->get<VerificationResult>();
        }
        r.duration_seconds = j.value("duration_seconds", 0.0);
        r.error_detail = j.value("error_detail", std::string{});
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("malformed attempt record: {}", e.what()));
    }
    r.trajectory.instance_id = r.instance_id;
    r.trajectory.attempt_index = r.attempt_index;
    r.trajectory.temperature = r.temperature;
    return r;
}

json run_config_to_json(const RunConfig& c) {
    json backend = c.backend.options;
    backend["kind"] = c.backend.kind;
    return json{{"max_iterations", c.max_iterations},
                {"attempt_temperatures", c.attempt_temperatures},
                {"parallelism", c.parallelism},
                {"output_dir", c.output_dir.string()},
                {"backend", backend},
                {"retry_policy", to_string(c.retry_predicate)},
                {"tools",
                 {{"observation_cap", c.tools.observation_cap},
                  {"default_bash_timeout", c.tools.default_bash_timeout},
                  {"max_bash_timeout", c.tools.max_bash_timeout}}},
                {"max_output_tokens", c.max_output_tokens},
                {"infra_retries", c.infra_retries},
                {"strike_limit", c.strike_limit},
                {"keep_workspaces", c.keep_workspaces}};
}

RunConfig run_config_from_json(const json& j) {
    RunConfig c;
    try {
        c.max_iterations = j.value("max_iterations", c.max_iterations);
        c.attempt_temperatures = j.value("attempt_temperatures", c.attempt_temperatures);
        c.parallelism = j.value("parallelism", c.parallelism);
        c.output_dir = j.value("output_dir", std::string{});
        if (auto it = j.find("backend"); it != j.end()) {
            c.backend.options = *it;
            c.backend.kind = it->value("kind", std::string{});
            c.backend.options.erase("kind");
        }
        if (auto it = j.find("retry_policy"); it != j.end()) {
            c.retry_predicate = retry_predicate_from_string(it->get<std::string>());
        }
        if (auto it = j.find("tools"); it != j.end()) {
            c.tools.observation_cap = it->value("observation_cap", c.tools.observation_cap);
            c.tools.default_bash_timeout = it->value("default_bash_timeout", c.tools.default_bash_timeout);
            c.tools.max_bash_timeout = it->value("max_bash_timeout", c.tools.max_bash_timeout);
        }
        c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
        c.infra_retries = j.value("infra_retries", c.infra_retries);
        c.strike_limit = j.value("strike_limit", c.strike_limit);
        c.keep_workspaces = j.value("keep_workspaces", c.keep_workspaces);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("malformed run configuration: {}", e.what()));
    }
    return c;
}

}  // namespace harness
