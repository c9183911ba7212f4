// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "harness/agent/prompt.hpp"
#include "harness/core/errors.hpp"
#include "harness/curation/export.hpp"
#include "harness/curation/filters.hpp"
#include "harness/curation/pipeline.hpp"
#include "test_support.hpp"

namespace harness {
namespace {

using json = nlohmann::json;

const std::vector<ToolSpec>& tools() {
    static const auto specs = default_tools(ToolSettings{});
    return specs;
}

AttemptRecord good_attempt() {
    AttemptRecord a;
    a.status = AttemptStatus::finished;
    a.patch = testing::fake_patch(true);
    a.assistant_turns = 5;
    a.max_iterations = 50;
    a.resolved = Resolution::resolved;
    return a;
}

bool has(const std::vector<std::string>& reasons, const char* r) {
    return std::find(reasons.begin(), reasons.end(), r) != reasons.end();
}

TEST(Stage1, AcceptsCleanFinishedAttempt) {
    const auto v = stage1_filter("x", Trajectory{}, good_attempt());
    EXPECT_TRUE(v.stage1_pass);
    EXPECT_TRUE(v.stage1_reasons.empty());
}

TEST(Stage1, ListsEveryFailedCheck) {
    auto a = good_attempt();
    a.status = AttemptStatus::agent_error;
    a.patch.clear();
    a.assistant_turns = 1;
    const auto v = stage1_filter("x", Trajectory{}, a);
    EXPECT_FALSE(v.stage1_pass);
    EXPECT_TRUE(has(v.stage1_reasons, kReasonNotFinished));
    EXPECT_TRUE(has(v.stage1_reasons, kReasonEmptyPatch));
    EXPECT_TRUE(has(v.stage1_reasons, kReasonTooFewTurns));
    EXPECT_TRUE(has(v.stage1_reasons, kReasonAgentErrorStrikes));
}

TEST(Stage1, TurnBoundsAndRejections) {
    auto a = good_attempt();
    a.assistant_turns = 51;
    EXPECT_TRUE(has(stage1_filter("x", Trajectory{}, a).stage1_reasons, kReasonTooManyTurns));
    a.assistant_turns = 50;
    EXPECT_TRUE(stage1_filter("x", Trajectory{}, a).stage1_pass);
    a.assistant_turns = 2;
    EXPECT_TRUE(stage1_filter("x", Trajectory{}, a).stage1_pass);
    a.rejected_calls = 1;
    EXPECT_TRUE(has(stage1_filter("x", Trajectory{}, a).stage1_reasons, kReasonAgentErrorStrikes));
    a.rejected_calls = 0;
    a.status = AttemptStatus::iteration_limit;
    EXPECT_TRUE(has(stage1_filter("x", Trajectory{}, a).stage1_reasons, kReasonNotFinished));
}

TEST(Stage1, EventsOverrideRecordCounts) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        const auto t = testing::random_trajectory(rng);
        auto a = good_attempt();
        a.assistant_turns = 1000;
        a.max_iterations = 0;
        const auto v = stage1_filter("x", t, a);
        EXPECT_EQ(has(v.stage1_reasons, kReasonTooFewTurns), t.assistant_turns() < kMinCuratedTurns);
        EXPECT_EQ(has(v.stage1_reasons, kReasonAgentErrorStrikes), t.rejected_calls() > 0);
    }
}

TEST(Stage2, Reasons) {
    VerificationResult ok;
    ok.resolved = true;
    VerificationResult bad;
    const auto pass1 = stage1_filter("x", Trajectory{}, good_attempt());
    EXPECT_TRUE(stage2_filter(pass1, ok).stage2_pass);
    EXPECT_EQ(stage2_filter(pass1, bad).stage2_reasons, std::vector<std::string>{kReasonTestsFailed});
    EXPECT_EQ(stage2_filter(pass1, std::nullopt).stage2_reasons, std::vector<std::string>{kReasonUnverified});
    auto a = good_attempt();
    a.patch.clear();
    const auto fail1 = stage1_filter("x", Trajectory{}, a);
    const auto v = stage2_filter(fail1, ok);
    EXPECT_FALSE(v.stage2_pass);
    EXPECT_EQ(v.stage2_reasons, std::vector<std::string>{kReasonStage1Failed});
}

TEST(Stage2, IsSubsetOfStage1) {
    std::mt19937_64 rng(11);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 2000; ++i) {
        AttemptRecord a;
        a.status = static_cast<AttemptStatus>(rng() % 4);
        a.patch = testing::fake_patch(coin(rng));
        a.assistant_turns = static_cast<int>(rng() % 8);
        a.max_iterations = static_cast<int>(rng() % 8);
        a.rejected_calls = coin(rng) ? 0 : 1;
        std::optional<VerificationResult> v;
        if (coin(rng)) {
            v.emplace();
            v->resolved = coin(rng);
        }
        const auto verdict = stage2_filter(stage1_filter("x", Trajectory{}, a), v);
        if (verdict.stage2_pass) {
            EXPECT_TRUE(verdict.stage1_pass);
            EXPECT_TRUE(v && v->resolved);
        }
    }
}

TEST(Xml, Escaping) {
    EXPECT_EQ(xml_escape("a<b>&c"), "a&lt;b&gt;&amp;c");
    EXPECT_EQ(xml_escape("&amp;"), "&amp;amp;");
    EXPECT_EQ(xml_unescape(xml_escape("</bash>&lt;\"'\n\r\n")), "</bash>&lt;\"'\n\r\n");
    EXPECT_THROW(xml_unescape("&quot;"), ValidationError);
    EXPECT_THROW(xml_unescape("&"), ValidationError);
}

TEST(Xml, CallsRoundTrip) {
    const std::vector<Action> actions{
        {"bash", {{"command", "cat <<'EOF' > x\n</bash>\nEOF"}, {"timeout", 30}}},
        {"file_edit", {{"command", "insert"}, {"path", "a&b.py"}, {"insert_line", 3}, {"new_str", "  <tag>\n"}}},
        {"finish", {{"message", ""}}},
    };
    const std::string text = render_xml_calls(actions, tools());
    EXPECT_NE(text.find("<timeout>30</timeout>"), std::string::npos);
    EXPECT_NE(text.find("&lt;/bash&gt;"), std::string::npos);
    EXPECT_EQ(parse_xml_calls(text, tools()), actions);
}

TEST(Xml, NonSchemaValuesKeepTheirType) {
    const std::vector<Action> actions{{"bash", {{"command", "ls"}, {"timeout", "30"}, {"extra", {1, "two"}}}}};
    EXPECT_EQ(parse_xml_calls(render_xml_calls(actions, tools()), tools()), actions);
}

TEST(Xml, RejectsUnrepresentableCalls) {
    EXPECT_THROW(render_xml_calls({{"bad name", json::object()}}, tools()), ValidationError);
    EXPECT_THROW(render_xml_calls({{"bash", json("raw text")}}, tools()), ValidationError);
    EXPECT_THROW(render_xml_calls({{"bash", {{"1x", "v"}}}}, tools()), ValidationError);
    EXPECT_THROW(parse_xml_calls("<bash>\n<command>ls</cmd>\n</bash>", tools()), ValidationError);
    EXPECT_THROW(parse_xml_calls("<bash>\n<command>ls", tools()), ValidationError);
}

TEST(Export, SkipsErrorsAndDropsDuplicates) {
    std::mt19937_64 rng(3);
    testing::RandomTrajectoryOptions clean;
    clean.allow_errors = false;
    clean.schema_valid_calls = true;
    const auto t1 = testing::random_trajectory(rng, clean);
    auto t2 = t1;
    t2.instance_id = "other";  // metadata only, same conversation
    Trajectory t3 = t1;
    Event err;
    err.index = t3.events.size();
    err.kind = EventKind::error;
    err.turn = t3.events.back().turn;
    err.payload = TextPayload{"backend: boom"};
    t3.events.push_back(err);

    const std::vector<ExportInput> inputs{{"a", &t1, "stage1"}, {"b", &t2, "stage1"}, {"c", &t3, "stage1"}};
    for (auto format : {SftFormat::function_calling, SftFormat::xml_pseudo_scaffold}) {
        const auto r = export_sft(inputs, format, tools());
        ASSERT_EQ(r.samples.size(), 1u);
        EXPECT_EQ(r.samples[0].source_trajectory_id, "a");
        EXPECT_EQ(r.duplicates, 1);
        ASSERT_EQ(r.skipped.size(), 1u);
        EXPECT_EQ(r.skipped[0].first, "c");
        EXPECT_EQ(SftSample::from_json(r.samples[0].to_json()).sha256, r.samples[0].sha256);
    }
}

TEST(Export, FunctionCallingCarriesTools) {
    std::mt19937_64 rng(5);
    testing::RandomTrajectoryOptions clean;
    clean.allow_errors = false;
    clean.schema_valid_calls = true;
    const auto conv = render_conversation(testing::random_trajectory(rng, clean), SftFormat::function_calling, tools());
    ASSERT_TRUE(conv.contains("tools"));
    EXPECT_EQ(conv["tools"].size(), tools().size());
    EXPECT_EQ(conv["messages"][0]["role"], "system");
}

TEST(Export, FormatNames) {
    EXPECT_EQ(sft_format_from_string("xml"), SftFormat::xml_pseudo_scaffold);
    EXPECT_EQ(sft_format_from_string("function_calling"), SftFormat::function_calling);
    EXPECT_THROW(sft_format_from_string("chatml"), ConfigError);
}

TEST(Export, RandomTrajectoriesRoundTripInBothFormats) {
    std::mt19937_64 rng(20240601);
    testing::RandomTrajectoryOptions clean;
    clean.allow_errors = false;
    clean.schema_valid_calls = true;
    for (int i = 0; i < 1000; ++i) {
        const auto t = testing::random_trajectory(rng, clean);
        const auto expected = action_sequence(t);
        for (auto format : {SftFormat::function_calling, SftFormat::xml_pseudo_scaffold}) {
            const auto conv = render_conversation(t, format, tools());
            const auto reparsed = json::parse(conv.dump());
            ASSERT_EQ(parse_conversation(reparsed, format, tools()), expected)
                << "trajectory " << i << " format " << to_string(format);
        }
    }
}

TEST(Pipeline, MissingRunDirectory) {
    testing::TempDir tmp;
    EXPECT_THROW(load_run_attempts(tmp / "nope"), ConfigError);
    EXPECT_TRUE(load_run_attempts(tmp.path()).empty());
}

}  // namespace
}  // namespace harness
