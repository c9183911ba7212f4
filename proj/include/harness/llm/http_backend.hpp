// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <string>

#include "harness/llm/backend.hpp"
#include "harness/llm/retry.hpp"

namespace harness {

struct HttpBackendOptions {
    std::string base_url;        // e.g. http://localhost:8000/v1
    std::string model;
    std::string api_key;         // sent as a bearer token when non-empty
    std::chrono::seconds timeout{600};
    BackoffPolicy backoff;
};

HttpBackendOptions http_options_from_json(const nlohmann::json& options);

/// Speaks POST {base_url}/chat/completions. Connection failures, 408, 429
/// and 5xx responses are retried with capped exponential backoff; any other
/// non-200 status fails immediately with the status and body in the message.
class HttpBackend : public Backend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(HttpBackendOptions options, Sleeper sleeper = {});

    Completion complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                        const std::vector<ToolSpec>& tools, const SamplingParams& params) override;
    std::string model_name() const override { return options_.model; }

private:
    HttpBackendOptions options_;
    std::string scheme_host_port_;
    std::string path_prefix_;
    Sleeper sleeper_;
};

}  // namespace harness
