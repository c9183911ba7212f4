// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/replay_backend.hpp"

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/event_log.hpp"

namespace harness {

namespace {

constexpr std::string_view kRootToken = "<workspace-root>";

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
    if (from.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(from, pos)) != std::string::npos) {
        text.replace(pos, from.size(), to);
        pos += to.size();
    }
    return text;
}

ChatMessage rewrite_roots(ChatMessage m, std::string_view from, std::string_view to) {
    m.content = replace_all(std::move(m.content), from, to);
    for (auto& c : m.tool_calls) c.arguments = replace_all(std::move(c.arguments), from, to);
    return m;
}

}  // namespace

ReplayBackend::ReplayBackend(fs::path source) : source_(std::move(source)) {
    std::error_code ec;
    if (!fs::exists(source_, ec)) throw ConfigError(fmt::format("replay source {} does not exist", source_.string()));
}

const ReplayBackend::Recording& ReplayBackend::recording_for(const CallContext& context) {
    const bool single = fs::is_regular_file(source_);
    const auto key = single ? std::pair<std::string, int>{"", 0}
                            : std::pair<std::string, int>{context.instance_id, context.attempt_index};
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;

    const fs::path log = single ? source_
                                : source_ / "instances" / context.instance_id /
                                      fmt::format("attempt{}", context.attempt_index) / "events.jsonl";
    if (!fs::exists(log)) {
        throw ReplayMismatch(fmt::format("no recorded event log for instance '{}' attempt {} ({})",
                                         context.instance_id, context.attempt_index, log.string()));
    }
    const Trajectory t = read_event_log(log);
    Recording rec;
    rec.messages = messages_from_events(t.events);
    rec.workspace_root = t.workspace_root;
    int turn = 0;
    for (const auto& e : t.events) {
        if (is_assistant_event(e.kind) && e.turn != turn) {
            turn = e.turn;
            rec.turn_usage.push_back(e.usage.value_or(TokenUsage{}));
        }
    }
    return cache_.emplace(key, std::move(rec)).first->second;
}

Completion ReplayBackend::complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                                   const std::vector<ToolSpec>& tools, const SamplingParams& params) {
    const Recording& rec = recording_for(context);

    std::size_t wanted = 0;
    for (const auto& m : messages) wanted += m.role == Role::assistant ? 1 : 0;
    std::size_t seen = 0;
    std::size_t position = rec.messages.size();
    for (std::size_t i = 0; i < rec.messages.size(); ++i) {
        if (rec.messages[i].role != Role::assistant) continue;
        if (seen++ == wanted) {
            position = i;
            break;
        }
    }
    if (position == rec.messages.size()) {
        throw ReplayMismatch(fmt::format("recording for '{}' attempt {} has only {} assistant turns",
                                         context.instance_id, context.attempt_index, seen));
    }
    if (messages.size() != position) {
        throw ReplayMismatch(fmt::format("conversation has {} messages where the recording has {} before turn {}",
                                         messages.size(), position, wanted + 1));
    }
    for (std::size_t i = 0; i < position; ++i) {
        const auto recorded = rewrite_roots(rec.messages[i], rec.workspace_root, kRootToken);
        const auto live = rewrite_roots(messages[i], context.workspace_root, kRootToken);
        if (!(recorded == live)) {
            throw ReplayMismatch(fmt::format("conversation diverges from the recording at message {} ({})", i,
                                             to_string(messages[i].role)));
        }
    }

    Completion completion;
    completion.message = rec.messages[position];
    if (!rec.workspace_root.empty() && !context.workspace_root.empty()) {
        completion.message = rewrite_roots(std::move(completion.message), rec.workspace_root, context.workspace_root);
    }
    if (wanted < rec.turn_usage.size()) completion.usage = rec.turn_usage[wanted];
    if (context.audit) {
        context.audit->record(to_wire_request(model_name(), messages, tools, params),
                              to_wire_response(model_name(), completion));
    }
    return completion;
}

}  // namespace harness
