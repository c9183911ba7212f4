// SPDX-License-Identifier: Apache-2.0
#include "harness/llm/http_backend.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "harness/core/errors.hpp"

namespace harness {

using nlohmann::json;

namespace {

bool is_retryable_status(int status) { return status == 408 || status == 429 || (status >= 500 && status <= 599); }

}  // namespace

HttpBackendOptions http_options_from_json(const json& options) {
    HttpBackendOptions o;
    try {
        o.base_url = options.at("base_url").get<std::string>();
        o.model = options.at("model").get<std::string>();
        const auto key_env = options.value("api_key_env", std::string{"AGENT_HARNESS_API_KEY"});
        if (const char* key = std::getenv(key_env.c_str())) o.api_key = key;
        o.timeout = std::chrono::seconds(options.value("timeout_seconds", 600));
        o.backoff.max_retries = options.value("max_retries", 3);
        o.backoff.initial_delay = std::chrono::milliseconds(options.value("initial_backoff_ms", 1000));
        o.backoff.max_delay = std::chrono::milliseconds(options.value("max_backoff_ms", 30000));
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("http backend descriptor needs base_url and model: {}", e.what()));
    }
    if (o.model.empty()) throw ConfigError("http backend model name is empty");
    if (o.timeout.count() <= 0) throw ConfigError("http backend timeout must be positive");
    if (o.backoff.max_retries < 0) throw ConfigError("http backend max_retries must be >= 0");
    return o;
}

HttpBackend::HttpBackend(HttpBackendOptions options, Sleeper sleeper)
    : options_(std::move(options)), sleeper_(std::move(sleeper)) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(options_.base_url, m, kUrl)) {
        throw ConfigError(fmt::format("http backend base_url '{}' is not an http(s) URL", options_.base_url));
    }
    scheme_host_port_ = m[1].str();
    path_prefix_ = m[2].str();
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

Completion HttpBackend::complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                                 const std::vector<ToolSpec>& tools, const SamplingParams& params) {
    validate(params);
    const json request = to_wire_request(options_.model, messages, tools, params);
    const std::string body = request.dump();
    const std::string path = path_prefix_ + "/chat/completions";

    httplib::Client client(scheme_host_port_);
    const auto secs = static_cast<time_t>(options_.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= options_.backoff.max_retries; ++attempt) {
        if (attempt > 0) {
            spdlog::warn("retrying chat completion for {} (retry {}/{}): {}", context.instance_id, attempt,
                         options_.backoff.max_retries, last_error);
            sleeper_(options_.backoff.delay_for(attempt));
        }
        auto res = client.Post(path, headers, body, "application/json");
        if (!res) {
            last_error = fmt::format("transport error: {}", httplib::to_string(res.error()));
            continue;
        }
        if (res->status == 200) {
            json response;
            try {
                response = json::parse(res->body);
            } catch (const json::parse_error& e) {
                if (context.audit) context.audit->record(request, json{{"error", "unparsable body"}, {"body", res->body}});
                throw InfraError(fmt::format("chat-completions response is not JSON: {}", e.what()));
            }
            if (context.audit) context.audit->record(request, response);
            return parse_wire_response(response);
        }
        last_error = fmt::format("HTTP {}: {}", res->status, res->body.substr(0, 500));
        if (!is_retryable_status(res->status)) {
            if (context.audit) context.audit->record(request, json{{"error", last_error}, {"status", res->status}});
            throw InfraError(fmt::format("chat-completions request rejected with {}", last_error));
        }
    }
    if (context.audit) context.audit->record(request, json{{"error", last_error}});
    throw InfraError(fmt::format("chat-completions request failed after {} retries: {}", options_.backoff.max_retries,
                                 last_error));
}

}  // namespace harness
