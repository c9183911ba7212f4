// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "harness/agent/prompt.hpp"
#include "harness/core/errors.hpp"
#include "harness/llm/backend.hpp"
#include "harness/llm/http_backend.hpp"
#include "harness/llm/scripted_backend.hpp"
#include "harness/llm/wire.hpp"
#include "test_support.hpp"

namespace harness {
namespace {

using json = nlohmann::json;

std::vector<ChatMessage> conversation(int assistant_turns) {
    std::vector<ChatMessage> m{ChatMessage::system("sys"), ChatMessage::user("go")};
    for (int i = 0; i < assistant_turns; ++i) {
        m.push_back(ChatMessage::assistant("", {{"c" + std::to_string(i), "bash", R"({"command":"ls"})"}}));
        m.push_back(ChatMessage::tool("c" + std::to_string(i), "out"));
    }
    return m;
}

TEST(Scripted, ServesTurnsByPosition) {
    ScriptedBackend b({Script{"*", std::nullopt, {ScriptedTurn::bash("echo x > f.txt"), ScriptedTurn::finish()}, false}});
    CallContext ctx{"i", 1, "/w", nullptr};
    auto first = b.complete(ctx, conversation(0), {}, {});
    ASSERT_EQ(first.message.tool_calls.size(), 1u);
    EXPECT_EQ(first.message.tool_calls[0].name, "bash");
    EXPECT_EQ(first.message.tool_calls[0].id, "call_1_1");
    EXPECT_EQ(json::parse(first.message.tool_calls[0].arguments)["command"], "echo x > f.txt");
    auto second = b.complete(ctx, conversation(1), {}, {});
    EXPECT_EQ(second.message.tool_calls.at(0).name, "finish");
    EXPECT_EQ(b.complete(ctx, conversation(0), {}, {}).message, first.message);
    EXPECT_THROW(b.complete(ctx, conversation(2), {}, {}), QueueExhausted);
}

TEST(Scripted, EmptyQueueExhaustsImmediately) {
    ScriptedBackend b({Script{}});
    EXPECT_THROW(b.complete({"i", 1, "/w", nullptr}, conversation(0), {}, {}), QueueExhausted);
}

TEST(Scripted, RepeatLastAndPerInstanceScripts) {
    auto b = ScriptedBackend::from_json(json::parse(R"({"scripts": [
        {"instance": "a", "attempt": 2, "turns": [{"content": "a2"}]},
        {"instance": "a", "turns": [{"content": "a-any"}], "repeat_last": true},
        {"turns": [{"content": "other"}]}]})"));
    EXPECT_EQ(b.complete({"a", 2, "", nullptr}, conversation(0), {}, {}).message.content, "a2");
    EXPECT_EQ(b.complete({"a", 1, "", nullptr}, conversation(5), {}, {}).message.content, "a-any");
    EXPECT_EQ(b.complete({"b", 1, "", nullptr}, conversation(0), {}, {}).message.content, "other");
    EXPECT_THROW(b.complete({"b", 1, "", nullptr}, conversation(1), {}, {}), QueueExhausted);
}

TEST(Scripted, MalformedCallsArePassedThrough) {
    auto b = ScriptedBackend::from_json(
        json::parse(R"({"queue": [{"tool_calls": [{"name": "nope", "arguments": "{not json"}]}]})"));
    auto c = b.complete({"i", 1, "", nullptr}, conversation(0), {}, {});
    ASSERT_EQ(c.message.tool_calls.size(), 1u);
    EXPECT_EQ(c.message.tool_calls[0].name, "nope");
    EXPECT_EQ(c.message.tool_calls[0].arguments, "{not json");
}

TEST(Wire, RequestCarriesModelTemperatureAndTools) {
    SamplingParams p;
    p.temperature = 0.0;
    p.max_output_tokens = 77;
    const auto body = to_wire_request("org/model-v1.2", conversation(1), default_tools({}), p);
    const std::string text = body.dump();
    EXPECT_NE(text.find(R"("model":"org/model-v1.2")"), std::string::npos);
    EXPECT_NE(text.find(R"("temperature":0.0)"), std::string::npos);
    EXPECT_EQ(body.at("max_tokens"), 77);
    EXPECT_EQ(body.at("tools").size(), 3u);
    EXPECT_EQ(body.at("messages").size(), 4u);
    EXPECT_EQ(body.at("messages")[3].at("tool_call_id"), "c0");
}

TEST(Wire, MessagesRoundTrip) {
    for (const auto& m : conversation(2)) EXPECT_EQ(from_wire_message(to_wire_message(m)), m);
    Completion c{ChatMessage::assistant("t", {{"id1", "bash", "{}"}}), {5, 6}};
    const auto back = parse_wire_response(to_wire_response("m", c));
    EXPECT_EQ(back.message, c.message);
    EXPECT_EQ(back.usage, c.usage);
    EXPECT_THROW(parse_wire_response(json{{"choices", json::array()}}), InfraError);
    EXPECT_THROW(parse_wire_response(json{{"nope", 1}}), InfraError);
}

TEST(Wire, ObjectArgumentsAreStringified) {
    auto m = from_wire_message(json::parse(
        R"({"role":"assistant","content":null,"tool_calls":[{"id":"x","function":{"name":"bash","arguments":{"command":"ls"}}}]})"));
    EXPECT_EQ(m.content, "");
    EXPECT_EQ(json::parse(m.tool_calls.at(0).arguments), json::parse(R"({"command":"ls"})"));
}

TEST(Descriptor, ShorthandsAndErrors) {
    auto h = parse_backend_descriptor("http:my-model@http://localhost:9/v1");
    EXPECT_EQ(h.kind, "http");
    EXPECT_EQ(h.options.at("model"), "my-model");
    EXPECT_EQ(h.options.at("base_url"), "http://localhost:9/v1");
    EXPECT_EQ(parse_backend_descriptor("replay:/tmp/run").options.at("log"), "/tmp/run");
    EXPECT_EQ(parse_backend_descriptor(R"({"kind":"scripted","queue":[]})").kind, "scripted");
    EXPECT_THROW(parse_backend_descriptor("carrier-pigeon"), ConfigError);
    EXPECT_THROW(make_backend({"smoke-signal", json::object()}), ConfigError);
    EXPECT_THROW(make_backend({"http", json{{"base_url", "ftp://x"}, {"model", "m"}}}), ConfigError);
    EXPECT_THROW(make_backend({"http", json{{"base_url", "http://x"}}}), ConfigError);
}

TEST(Descriptor, PinningInlinesScriptFiles) {
    testing::TempDir tmp;
    testing::write_text(tmp / "s.json", R"([{"content":"hello"}])");
    auto d = parse_backend_descriptor("scripted:" + (tmp / "s.json").string());
    auto pinned = pin_backend_descriptor(d);
    fs::remove(tmp / "s.json");
    auto b = make_backend(pinned);
    EXPECT_EQ(b->complete({"i", 1, "", nullptr}, conversation(0), {}, {}).message.content, "hello");
    EXPECT_FALSE(pinned.options.contains("script_file"));
}

TEST(Sampling, Validation) {
    SamplingParams p;
    p.temperature = 2.5;
    EXPECT_THROW(validate(p), ConfigError);
    p.temperature = 1.0;
    p.max_output_tokens = 0;
    EXPECT_THROW(validate(p), ConfigError);
}

// Local chat-completions endpoint with a programmable status sequence.
class FakeServer {
public:
    FakeServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            int status = 200;
            {
                std::lock_guard<std::mutex> lock(mutex_);
                bodies_.push_back(req.body);
                headers_.push_back(req.get_header_value("Authorization"));
                if (!statuses_.empty()) {
                    status = statuses_.front();
                    statuses_.erase(statuses_.begin());
                }
            }
            if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
            res.status = status;
            if (status != 200) {
                res.set_content(R"({"error":"busy"})", "application/json");
                return;
            }
            res.set_content(reply_.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    void set_statuses(std::vector<int> s) { statuses_ = std::move(s); }
    void set_reply(json r) { reply_ = std::move(r); }
    void set_delay_ms(int ms) { delay_ms_ = ms; }
    std::vector<std::string> bodies() {
        std::lock_guard<std::mutex> lock(mutex_);
        return bodies_;
    }
    std::vector<std::string> auth_headers() {
        std::lock_guard<std::mutex> lock(mutex_);
        return headers_;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mutex_;
    std::vector<std::string> bodies_;
    std::vector<std::string> headers_;
    std::vector<int> statuses_;
    std::atomic<int> delay_ms_{0};
    json reply_ = to_wire_response("served", {ChatMessage::assistant("ok"), {12, 3}});
};

HttpBackendOptions options_for(const FakeServer& s, int retries) {
    HttpBackendOptions o;
    o.base_url = s.url();
    o.model = "vendor/Model-7B:latest";
    o.timeout = std::chrono::seconds(5);
    o.backoff.max_retries = retries;
    return o;
}

TEST(Http, SendsModelVerbatimAndParsesReply) {
    FakeServer server;
    std::vector<std::chrono::milliseconds> sleeps;
    HttpBackend backend(options_for(server, 3), [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    SamplingParams p;
    p.temperature = 0.0;
    auto c = backend.complete({"i", 1, "", nullptr}, conversation(0), default_tools({}), p);
    EXPECT_EQ(c.message.content, "ok");
    EXPECT_EQ(c.usage, (TokenUsage{12, 3}));
    ASSERT_EQ(server.bodies().size(), 1u);
    const std::string body = server.bodies()[0];
    EXPECT_NE(body.find(R"("model":"vendor/Model-7B:latest")"), std::string::npos);
    EXPECT_NE(body.find(R"("temperature":0.0)"), std::string::npos);
    EXPECT_TRUE(sleeps.empty());
    EXPECT_EQ(server.auth_headers()[0], "");
}

TEST(Http, RetriesTransientStatusesWithBackoff) {
    FakeServer server;
    server.set_statuses({503, 429, 200});
    std::vector<std::chrono::milliseconds> sleeps;
    auto opts = options_for(server, 3);
    opts.api_key = "sekret";
    HttpBackend backend(opts, [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
    EXPECT_EQ(backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {}).message.content, "ok");
    EXPECT_EQ(server.bodies().size(), 3u);
    ASSERT_EQ(sleeps.size(), 2u);
    EXPECT_EQ(sleeps[0], opts.backoff.delay_for(1));
    EXPECT_EQ(sleeps[1], opts.backoff.delay_for(2));
    EXPECT_EQ(server.auth_headers()[0], "Bearer sekret");
}

TEST(Http, GivesUpAfterMaxRetries) {
    FakeServer server;
    server.set_statuses({500, 500, 500});
    HttpBackend backend(options_for(server, 2), [](std::chrono::milliseconds) {});
    EXPECT_THROW(backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {}), InfraError);
    EXPECT_EQ(server.bodies().size(), 3u);
}

TEST(Http, ClientErrorsAreNotRetried) {
    FakeServer server;
    server.set_statuses({400});
    HttpBackend backend(options_for(server, 3), [](std::chrono::milliseconds) {});
    try {
        backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {});
        FAIL() << "expected InfraError";
    } catch (const InfraError& e) {
        EXPECT_NE(std::string(e.what()).find("400"), std::string::npos);
    }
    EXPECT_EQ(server.bodies().size(), 1u);
}

TEST(Http, MalformedToolCallsReachTheCaller) {
    FakeServer server;
    server.set_reply(json::parse(
        R"({"choices":[{"message":{"role":"assistant","content":"","tool_calls":[{"id":"t1","type":"function","function":{"name":"bash","arguments":"{\"command\": "}}]}}]})"));
    HttpBackend backend(options_for(server, 0), [](std::chrono::milliseconds) {});
    auto c = backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {});
    ASSERT_EQ(c.message.tool_calls.size(), 1u);
    EXPECT_EQ(c.message.tool_calls[0].arguments, "{\"command\": ");
    EXPECT_EQ(c.usage, TokenUsage{});
}

TEST(Http, ReadTimeoutIsInfraError) {
    FakeServer server;
    server.set_delay_ms(2500);
    auto opts = options_for(server, 0);
    opts.timeout = std::chrono::seconds(1);
    HttpBackend backend(opts, [](std::chrono::milliseconds) {});
    EXPECT_THROW(backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {}), InfraError);
}

TEST(Http, UnreachableEndpointIsInfraError) {
    HttpBackendOptions o;
    o.base_url = "http://127.0.0.1:1/v1";
    o.model = "m";
    o.timeout = std::chrono::seconds(2);
    o.backoff.max_retries = 1;
    int sleeps = 0;
    HttpBackend backend(o, [&](std::chrono::milliseconds) { ++sleeps; });
    EXPECT_THROW(backend.complete({"i", 1, "", nullptr}, conversation(0), {}, {}), InfraError);
    EXPECT_EQ(sleeps, 1);
}

TEST(Http, AuditRecordsEveryExchange) {
    FakeServer server;
    testing::TempDir tmp;
    RequestAudit audit(tmp / "requests.jsonl");
    HttpBackend backend(options_for(server, 0), [](std::chrono::milliseconds) {});
    backend.complete({"i", 1, "", &audit}, conversation(0), {}, {});
    backend.complete({"i", 1, "", &audit}, conversation(1), {}, {});
    std::ifstream in(audit.path());
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        auto j = json::parse(line);
        EXPECT_TRUE(j.contains("request"));
        EXPECT_TRUE(j.contains("response"));
        ++lines;
    }
    EXPECT_EQ(lines, 2);
}

}  // namespace
}  // namespace harness
