// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "harness/core/types.hpp"
#include "harness/llm/chat.hpp"
#include "harness/llm/wire.hpp"

namespace harness {

/// Line-delimited audit log of wire requests and responses. Thread-safe.
class RequestAudit {
public:
    explicit RequestAudit(fs::path path);

    void record(const nlohmann::json& request, const nlohmann::json& response);
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
    std::mutex mutex_;
};

/// Identifies the episode a request belongs to. Scripted and replay backends
/// key their responses on it; audit receives every exchange when set.
struct CallContext {
    std::string instance_id;
    int attempt_index = 1;
    std::string workspace_root;
    RequestAudit* audit = nullptr;
};

/// A chat-completions backend. complete() is safe to call concurrently.
///
/// Errors: InfraError for timeouts, exhausted retries and non-retryable
/// server responses; QueueExhausted and ReplayMismatch for the deterministic
/// backends. Tool-call validation is the caller's job: calls naming unknown
/// tools or carrying malformed arguments are returned as-is.
class Backend {
public:
    virtual ~Backend() = default;

    virtual Completion complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                                const std::vector<ToolSpec>& tools, const SamplingParams& params) = 0;

    virtual std::string model_name() const = 0;
};

/// Descriptor kinds:
///   http     {base_url, model, api_key_env?, timeout_seconds?, max_retries?,
///             initial_backoff_ms?, max_backoff_ms?}
///   scripted {queue: [turn...]} | {scripts: [{instance?, attempt?, turns, repeat_last?}]}
///            | {script_file: path}
///   replay   {log: event-log file or run directory}
/// Throws ConfigError for unknown kinds or malformed options. Reachability of
/// an http base URL is only checked by the first complete() call.
std::shared_ptr<Backend> make_backend(const BackendDescriptor& descriptor);

/// Accepts inline JSON, a path to a JSON file, or the shorthands
/// `scripted:<file>`, `replay:<path>` and `http:<model>@<base_url>`.
BackendDescriptor parse_backend_descriptor(std::string_view text);

/// Inlines referenced script files so the descriptor alone reproduces a run.
BackendDescriptor pin_backend_descriptor(const BackendDescriptor& descriptor);

}  // namespace harness
