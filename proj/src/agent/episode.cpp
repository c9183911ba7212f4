// SPDX-License-Identifier: Apache-2.0
#include "harness/agent/episode.hpp"

#include <chrono>
#include <optional>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "harness/agent/prompt.hpp"
#include "harness/agent/tool_parsing.hpp"
#include "harness/core/errors.hpp"
#include "harness/core/event_log.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/tools.hpp"
#include "harness/sandbox/vcs.hpp"
#include "harness/sandbox/workspace.hpp"

namespace harness {

namespace {

class Recorder {
public:
    Recorder(Trajectory& trajectory, const fs::path& log_path) : t_(trajectory), writer_(log_path, trajectory) {}

    void add(EventKind kind, int turn, EventPayload payload, std::optional<TokenUsage> usage = std::nullopt) {
        Event e;
        e.index = t_.events.size();
        e.kind = kind;
        e.turn = turn;
        e.payload = std::move(payload);
        e.timestamp_ms = now_ms();
        e.usage = usage;
        writer_.append(e);
        t_.events.push_back(std::move(e));
    }

private:
    Trajectory& t_;
    EventLogWriter writer_;
};

// Tears the workspace down on every exit path unless asked to keep it.
struct WorkspaceGuard {
    std::optional<Workspace> ws;
    bool keep = false;
    ~WorkspaceGuard() {
        if (ws && !keep) {
            try {
                teardown(*ws);
            } catch (const std::exception& e) {
                spdlog::warn("teardown of {} failed: {}", ws->root.string(), e.what());
            }
        }
    }
};

ObservationPayload observe(const std::string& call_id, const ToolResult& r) {
    return {call_id, r.output, r.exit_code, r.truncated, r.timed_out, false};
}

bool cancelled(const std::atomic<bool>* flag) { return flag != nullptr && flag->load(); }

}  // namespace

AttemptRecord run_episode(const TaskInstance& instance, Backend& backend, const EpisodeOptions& options) {
    validate(instance);
    const std::string system_prompt = build_system_prompt(instance);
    validate(options.params);
    if (options.budget.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
    if (options.strike_limit < 1) throw ValidationError("strike_limit must be at least 1");

    const auto started = std::chrono::steady_clock::now();
    const fs::path& dir = options.attempt_dir;
    std::error_code ec;
    fs::remove_all(dir, ec);
    fs::create_directories(dir);

    AttemptRecord record;
    record.instance_id = instance.id;
    record.attempt_index = options.attempt_index;
    record.temperature = options.params.temperature;
    record.max_iterations = options.budget.max_iterations;
    record.trajectory.instance_id = instance.id;
    record.trajectory.attempt_index = options.attempt_index;
    record.trajectory.temperature = options.params.temperature;

    auto finalize = [&](AttemptStatus status) {
        record.status = status;
        record.assistant_turns = record.trajectory.assistant_turns();
        record.rejected_calls = record.trajectory.rejected_calls();
        record.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_file_atomic(dir / "patch.diff", record.patch);
        write_file_atomic(dir / "summary.json", attempt_summary_to_json(record).dump(2) + "\n");
        return record;
    };

    WorkspaceGuard guard;
    guard.keep = options.keep_workspace;
    try {
        guard.ws = provision(instance, options.attempt_index, dir);
    } catch (const InfraError& e) {
        record.error_detail = fmt::format("provisioning failed: {}", to_valid_utf8(e.what()));
        return finalize(AttemptStatus::infra_error);
    }
    const Workspace& ws = *guard.ws;
    record.trajectory.workspace_root = ws.root.string();

    Recorder rec(record.trajectory, dir / "events.jsonl");
    RequestAudit audit(dir / "requests.jsonl");
    const CallContext context{instance.id, options.attempt_index, ws.root.string(), &audit};
    const auto tools = default_tools(options.tools);

    rec.add(EventKind::system_prompt, 0, TextPayload{system_prompt});
    rec.add(EventKind::user_task, 0, TextPayload{std::string(kickoff_message())});

    EpisodeBudget budget = options.budget;
    budget.elapsed_turns = 0;
    std::optional<AttemptStatus> status;
    int strikes = 0;

    while (!status && !budget.exhausted()) {
        if (cancelled(options.cancel)) throw Interrupted("episode cancelled");
        Completion completion;
        try {
            completion = backend.complete(context, messages_from_events(record.trajectory.events), tools,
                                          options.params);
        } catch (const InfraError& e) {
            if (cancelled(options.cancel)) throw Interrupted("episode cancelled");
            record.error_detail = fmt::format("backend failure: {}", to_valid_utf8(e.what()));
            rec.add(EventKind::error, budget.elapsed_turns, TextPayload{record.error_detail});
            status = AttemptStatus::infra_error;
            break;
        }
        const int turn = ++budget.elapsed_turns;
        const ChatMessage& msg = completion.message;
        std::optional<TokenUsage> usage = completion.usage;

        if (!msg.content.empty() || msg.tool_calls.empty()) {
            rec.add(EventKind::assistant_message, turn, TextPayload{msg.content}, std::exchange(usage, std::nullopt));
        }
        if (msg.tool_calls.empty()) {
            rec.add(EventKind::user_task, turn, TextPayload{std::string(nudge_message())});
            strikes = 0;
            continue;
        }

        bool rejected = false;
        for (auto& checked : parse_tool_calls(msg, tools, options.tools)) {
            const ToolCall& call = checked.call;
            if (!checked.ok()) {
                rejected = true;
                rec.add(EventKind::tool_call, turn, ToolCallPayload{call.id, call.name, call.arguments},
                        std::exchange(usage, std::nullopt));
                rec.add(EventKind::tool_observation, turn,
                        ObservationPayload{call.id, "Error: " + checked.error, std::nullopt, false, false, true});
                continue;
            }
            if (std::holds_alternative<FinishAction>(*checked.action)) {
                rec.add(EventKind::finish, turn, FinishPayload{call.id, call.arguments},
                        std::exchange(usage, std::nullopt));
                status = AttemptStatus::finished;
                break;  // later calls in the same turn are dropped
            }
            rec.add(EventKind::tool_call, turn, ToolCallPayload{call.id, call.name, call.arguments},
                    std::exchange(usage, std::nullopt));
            ToolResult result;
            if (const auto* bash = std::get_if<BashAction>(&*checked.action)) {
                const int timeout = bash->timeout_seconds.value_or(options.tools.default_bash_timeout);
                result = bash_execute(ws, bash->command, timeout, options.tools, options.cancel);
                if (cancelled(options.cancel)) throw Interrupted("episode cancelled");
            } else {
                result = file_edit(ws, std::get<FileEditRequest>(*checked.action), options.tools);
            }
            rec.add(EventKind::tool_observation, turn, observe(call.id, result));
        }
        if (status) break;
        strikes = rejected ? strikes + 1 : 0;
        if (strikes >= options.strike_limit) {
            record.error_detail = fmt::format("{} consecutive turns with malformed tool calls", strikes);
            status = AttemptStatus::agent_error;
        }
    }

    try {
        record.patch = extract_patch(ws);
    } catch (const InfraError& e) {
        record.error_detail = fmt::format("patch extraction failed: {}", to_valid_utf8(e.what()));
        return finalize(AttemptStatus::infra_error);
    }
    return finalize(status.value_or(AttemptStatus::iteration_limit));
}

}  // namespace harness
