// SPDX-License-Identifier: Apache-2.0
#include "harness/core/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <unistd.h>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/patch.hpp"

namespace harness {

namespace {

constexpr std::array kEventKindNames{
    std::pair{EventKind::system_prompt, std::string_view{"system_prompt"}},
    std::pair{EventKind::user_task, std::string_view{"user_task"}},
    std::pair{EventKind::assistant_message, std::string_view{"assistant_message"}},
    std::pair{EventKind::tool_call, std::string_view{"tool_call"}},
    std::pair{EventKind::tool_observation, std::string_view{"tool_observation"}},
    std::pair{EventKind::finish, std::string_view{"finish"}},
    std::pair{EventKind::error, std::string_view{"error"}},
};

constexpr std::array kStatusNames{
    std::pair{AttemptStatus::finished, std::string_view{"finished"}},
    std::pair{AttemptStatus::iteration_limit, std::string_view{"iteration_limit"}},
    std::pair{AttemptStatus::agent_error, std::string_view{"agent_error"}},
    std::pair{AttemptStatus::infra_error, std::string_view{"infra_error"}},
};

constexpr std::array kPredicateNames{
    std::pair{RetryPredicate::unresolved_or_empty_or_error, std::string_view{"unresolved_or_empty_or_error"}},
    std::pair{RetryPredicate::empty_or_error, std::string_view{"empty_or_error"}},
    std::pair{RetryPredicate::unresolved_only, std::string_view{"unresolved_only"}},
};

template <typename Table, typename Enum>
std::string_view name_of(const Table& table, Enum value) {
    for (const auto& [v, name] : table) {
        if (v == value) return name;
    }
    return "unknown";
}

template <typename Enum, typename Table>
Enum value_of(const Table& table, std::string_view text, std::string_view what) {
    for (const auto& [v, name] : table) {
        if (name == text) return v;
    }
    throw ValidationError(fmt::format("unknown {}: '{}'", what, text));
}

}  // namespace

std::string_view to_string(EventKind kind) { return name_of(kEventKindNames, kind); }
EventKind event_kind_from_string(std::string_view text) {
    return value_of<EventKind>(kEventKindNames, text, "event kind");
}

std::string_view to_string(AttemptStatus status) { return name_of(kStatusNames, status); }
AttemptStatus attempt_status_from_string(std::string_view text) {
    return value_of<AttemptStatus>(kStatusNames, text, "attempt status");
}

std::string_view to_string(Resolution resolution) {
    switch (resolution) {
        case Resolution::resolved: return "resolved";
        case Resolution::unresolved: return "unresolved";
        case Resolution::not_evaluated: return "not_evaluated";
    }
    return "not_evaluated";
}

std::string_view to_string(RetryPredicate predicate) { return name_of(kPredicateNames, predicate); }
RetryPredicate retry_predicate_from_string(std::string_view text) {
    try {
        return value_of<RetryPredicate>(kPredicateNames, text, "retry policy");
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

void validate(const TaskInstance& instance) {
    if (instance.id.empty()) throw ValidationError("instance id is empty");
    if (instance.id.find('/') != std::string::npos || instance.id == "." || instance.id == "..") {
        throw ValidationError(fmt::format("instance id '{}' must not contain '/' or be a dot path", instance.id));
    }
    if (instance.fail_to_pass.empty()) {
        throw ValidationError(fmt::format("instance '{}': fail_to_pass is empty", instance.id));
    }
    if (instance.timeout_seconds <= 0) {
        throw ValidationError(fmt::format("instance '{}': timeout_seconds must be positive", instance.id));
    }
    if (instance.test_command_template.find(kTestPlaceholder) == std::string::npos) {
        throw ValidationError(fmt::format("instance '{}': test_command_template lacks the {} placeholder",
                                          instance.id, kTestPlaceholder));
    }
    std::error_code ec;
    if (!fs::exists(instance.repo_source, ec) || ::access(instance.repo_source.c_str(), R_OK) != 0) {
        throw ValidationError(fmt::format("instance '{}': repo_source '{}' does not exist or is unreadable",
                                          instance.id, instance.repo_source.string()));
    }
}

bool is_assistant_event(EventKind kind) {
    return kind == EventKind::assistant_message || kind == EventKind::tool_call || kind == EventKind::finish;
}

int Trajectory::assistant_turns() const {
    std::set<int> turns;
    for (const auto& e : events) {
        if (is_assistant_event(e.kind)) turns.insert(e.turn);
    }
    return static_cast<int>(turns.size());
}

TokenUsage Trajectory::token_usage() const {
    TokenUsage total;
    for (const auto& e : events) {
        if (e.usage) total += *e.usage;
    }
    return total;
}

bool Trajectory::ends_with_finish() const {
    return !events.empty() && events.back().kind == EventKind::finish;
}

int Trajectory::rejected_calls() const {
    int n = 0;
    for (const auto& e : events) {
        if (const auto* obs = std::get_if<ObservationPayload>(&e.payload); obs && obs->rejected) ++n;
    }
    return n;
}

std::optional<std::string> check_invariants(const Trajectory& trajectory) {
    std::vector<std::string> pending;
    int current_turn = 0;
    int finishes = 0;
    const auto& events = trajectory.events;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.index != i) return fmt::format("event {} has index {}", i, e.index);
        if (finishes > 0) return fmt::format("event {} follows the finish event", i);
        if (is_assistant_event(e.kind) && e.turn != current_turn) {
            if (!pending.empty()) {
                return fmt::format("turn {} starts while call '{}' has no observation", e.turn, pending.front());
            }
            if (e.turn < current_turn) return fmt::format("event {} goes back to turn {}", i, e.turn);
            current_turn = e.turn;
        }
        switch (e.kind) {
            case EventKind::tool_call:
                pending.push_back(std::get<ToolCallPayload>(e.payload).call_id);
                break;
            case EventKind::tool_observation: {
                const auto& id = std::get<ObservationPayload>(e.payload).call_id;
                auto it = std::find(pending.begin(), pending.end(), id);
                if (it == pending.end()) return fmt::format("observation {} answers no pending call '{}'", i, id);
                pending.erase(it);
                break;
            }
            case EventKind::finish:
                ++finishes;
                break;
            default:
                break;
        }
    }
    if (!pending.empty()) return fmt::format("call '{}' never received an observation", pending.front());
    return std::nullopt;
}

bool AttemptRecord::patch_empty() const { return is_empty_patch(patch); }

bool is_valid_temperature(double t) { return std::isfinite(t) && t >= 0.0 && t <= 2.0; }

void validate(const RunConfig& config) {
    if (config.max_iterations < 1) {
        throw ConfigError(fmt::format("max_iterations must be >= 1 (got {})", config.max_iterations));
    }
    if (config.attempt_temperatures.empty()) throw ConfigError("attempt_temperatures must not be empty");
    for (double t : config.attempt_temperatures) {
        if (!is_valid_temperature(t)) throw ConfigError(fmt::format("temperature {} outside [0, 2]", t));
    }
    if (config.parallelism < 1) {
        throw ConfigError(fmt::format("parallelism must be >= 1 (got {})", config.parallelism));
    }
    if (config.max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
    if (config.infra_retries < 0) throw ConfigError("infra_retries must be >= 0");
    if (config.strike_limit < 1) throw ConfigError("strike_limit must be >= 1");
    if (config.tools.observation_cap < 64) throw ConfigError("observation cap must be >= 64 characters");
    if (config.tools.default_bash_timeout < 1 || config.tools.max_bash_timeout < config.tools.default_bash_timeout) {
        throw ConfigError("bash timeouts must satisfy 1 <= default <= max");
    }
}

}  // namespace harness
