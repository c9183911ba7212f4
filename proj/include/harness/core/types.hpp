// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace harness {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Task instances
// ---------------------------------------------------------------------------

/// Placeholder substituted with a shell-quoted test identifier.
inline constexpr std::string_view kTestPlaceholder = "{test}";

/// One repairable codebase task.
struct TaskInstance {
    std::string id;
    fs::path repo_source;         // directory, git repository, or tar archive
    std::string base_revision;    // used only when repo_source is a git repository
    std::string problem_statement;
    std::vector<std::string> setup_commands;
    std::vector<std::string> fail_to_pass;
    std::vector<std::string> pass_to_pass;
    std::string test_command_template;
    int timeout_seconds = 60;

    bool operator==(const TaskInstance&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const TaskInstance& instance);

// ---------------------------------------------------------------------------
// Event stream
// ---------------------------------------------------------------------------

enum class EventKind {
    system_prompt,
    user_task,
    assistant_message,
    tool_call,
    tool_observation,
    finish,
    error,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct TokenUsage {
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;

    TokenUsage& operator+=(const TokenUsage& other) {
        prompt_tokens += other.prompt_tokens;
        completion_tokens += other.completion_tokens;
        return *this;
    }
    bool operator==(const TokenUsage&) const = default;
};

/// Payload for system_prompt, user_task, assistant_message and error events.
struct TextPayload {
    std::string text;
    bool operator==(const TextPayload&) const = default;
};

/// A tool invocation as the model emitted it. `arguments` is the raw JSON
/// text; it may be malformed, in which case the matching observation is a
/// rejection.
struct ToolCallPayload {
    std::string call_id;
    std::string name;
    std::string arguments;
    bool operator==(const ToolCallPayload&) const = default;
};

struct ObservationPayload {
    std::string call_id;
    std::string content;              // exact text returned to the model
    std::optional<int> exit_code;     // none for editor ops and timeouts
    bool truncated = false;
    bool timed_out = false;
    bool rejected = false;            // the call failed schema validation
    bool operator==(const ObservationPayload&) const = default;
};

struct FinishPayload {
    std::string call_id;
    std::string arguments;
    bool operator==(const FinishPayload&) const = default;
};

using EventPayload = std::variant<TextPayload, ToolCallPayload, ObservationPayload, FinishPayload>;

struct Event {
    std::size_t index = 0;
    EventKind kind = EventKind::system_prompt;
    int turn = 0;                     // assistant turn this event belongs to; 0 = preamble
    EventPayload payload;
    std::int64_t timestamp_ms = 0;    // wall clock, milliseconds since the Unix epoch
    std::optional<TokenUsage> usage;  // set on the first event of an assistant turn

    bool operator==(const Event&) const = default;
};

bool is_assistant_event(EventKind kind);

/// Full recorded episode. Turn count and token usage are derived from the
/// events so they can never disagree with them.
struct Trajectory {
    std::string instance_id;
    int attempt_index = 1;
    double temperature = 0.0;
    std::string workspace_root;
    std::vector<Event> events;

    int assistant_turns() const;
    TokenUsage token_usage() const;
    bool ends_with_finish() const;
    /// Number of tool observations that rejected a malformed call.
    int rejected_calls() const;

    bool operator==(const Trajectory&) const = default;
};

/// Checks index contiguity, call/observation pairing and finish terminality.
/// Returns a description of the first violation, or nullopt.
std::optional<std::string> check_invariants(const Trajectory& trajectory);

// ---------------------------------------------------------------------------
// Attempts and verification
// ---------------------------------------------------------------------------

enum class AttemptStatus { finished, iteration_limit, agent_error, infra_error };
std::string_view to_string(AttemptStatus status);
AttemptStatus attempt_status_from_string(std::string_view text);

/// Tri-state verification outcome.
enum class Resolution { resolved, unresolved, not_evaluated };
std::string_view to_string(Resolution resolution);

struct TestResult {
    std::string test_id;
    bool passed = false;
    std::optional<int> exit_code;
    bool timed_out = false;
    std::string output_tail;

    bool operator==(const TestResult&) const = default;
};

struct VerificationResult {
    bool resolved = false;
    bool apply_failed = false;
    std::vector<TestResult> fail_to_pass;
    std::vector<TestResult> pass_to_pass;
    std::string detail;

    bool operator==(const VerificationResult&) const = default;
};

struct AttemptRecord {
    std::string instance_id;
    int attempt_index = 1;
    double temperature = 0.0;
    int max_iterations = 0;
    Trajectory trajectory;            // events may be absent when loaded from a summary
    int assistant_turns = 0;
    int rejected_calls = 0;
    std::string patch;
    AttemptStatus status = AttemptStatus::infra_error;
    Resolution resolved = Resolution::not_evaluated;
    std::optional<VerificationResult> verification;
    double duration_seconds = 0.0;
    std::string error_detail;

    bool patch_empty() const;
    bool is_resolved() const { return resolved == Resolution::resolved; }
};

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

enum class RetryPredicate { unresolved_or_empty_or_error, empty_or_error, unresolved_only };
std::string_view to_string(RetryPredicate predicate);
RetryPredicate retry_predicate_from_string(std::string_view text);

/// Backend selection: `kind` is one of http, scripted, replay; the remaining
/// keys are kind-specific (see llm/backend.hpp).
struct BackendDescriptor {
    std::string kind;
    nlohmann::json options = nlohmann::json::object();

    bool operator==(const BackendDescriptor&) const = default;
};

struct ToolSettings {
    std::size_t observation_cap = 30000;
    int default_bash_timeout = 120;
    int max_bash_timeout = 600;

    bool operator==(const ToolSettings&) const = default;
};

struct RunConfig {
    int max_iterations = 50;
    std::vector<double> attempt_temperatures{0.0, 0.1, 0.1};
    int parallelism = 1;
    fs::path output_dir;
    BackendDescriptor backend;
    RetryPredicate retry_predicate = RetryPredicate::unresolved_or_empty_or_error;
    ToolSettings tools;
    int max_output_tokens = 4096;
    int infra_retries = 2;
    int strike_limit = 5;
    bool keep_workspaces = false;
};

/// Throws ConfigError naming the offending field.
void validate(const RunConfig& config);

bool is_valid_temperature(double t);

}  // namespace harness
