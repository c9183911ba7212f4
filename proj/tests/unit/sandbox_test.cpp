// SPDX-License-Identifier: Apache-2.0
#include <sys/stat.h>

#include <chrono>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "harness/core/errors.hpp"
#include "harness/core/patch.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/subprocess.hpp"
#include "harness/sandbox/tools.hpp"
#include "harness/sandbox/vcs.hpp"
#include "harness/sandbox/workspace.hpp"
#include "test_support.hpp"

namespace harness {
namespace {

using testing::TempDir;

class SandboxTest : public ::testing::Test {
protected:
    void SetUp() override {
        instance_ = testing::make_instance(tmp_ / "src", "demo",
                                           {{"a.txt", "alpha\nbeta\ngamma\n"},
                                            {"pkg/mod.py", "x = 1\ny = 2\nx = 1\n"},
                                            {"pkg/sub/deep/leaf.txt", "leaf\n"}});
        ws_ = provision(instance_, 1, tmp_ / "attempt1");
    }

    ToolResult bash(std::string_view cmd, int timeout = 10) { return bash_execute(ws_, cmd, timeout, settings_); }

    ToolResult edit(FileEditRequest req) { return file_edit(ws_, req, settings_); }

    TempDir tmp_;
    TaskInstance instance_;
    Workspace ws_;
    ToolSettings settings_;
};

TEST_F(SandboxTest, ProvisionCopiesTheSnapshotExactly) {
    EXPECT_EQ(tree_snapshot(ws_.root), tree_snapshot(instance_.repo_source));
    EXPECT_EQ(extract_patch(ws_), "");
    struct stat st {};
    ASSERT_EQ(::stat((ws_.root / "a.txt").c_str(), &st), 0);
    EXPECT_EQ(st.st_mtime, kNormalizedMtime);
}

TEST_F(SandboxTest, ProvisionedCopiesAreIdenticalAndDisjoint) {
    Workspace other = provision(instance_, 2, tmp_ / "attempt2");
    EXPECT_EQ(tree_hash(other.root), tree_hash(ws_.root));
    EXPECT_NE(other.root, ws_.root);
    testing::write_text(other.root / "a.txt", "changed\n");
    EXPECT_EQ(read_file(ws_.root / "a.txt"), "alpha\nbeta\ngamma\n");
    EXPECT_EQ(extract_patch(ws_), "");
    EXPECT_NE(extract_patch(other), "");
}

TEST_F(SandboxTest, ConcurrentProvisioningStaysIsolated) {
    std::vector<std::thread> threads;
    std::vector<std::string> patches(4);
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&, i] {
            Workspace w = provision(instance_, 10 + i, tmp_ / ("par" + std::to_string(i)));
            testing::write_text(w.root / ("only" + std::to_string(i) + ".txt"), "x\n");
            patches[static_cast<std::size_t>(i)] = extract_patch(w);
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < 4; ++i) {
        const auto& p = patches[static_cast<std::size_t>(i)];
        for (int j = 0; j < 4; ++j) {
            EXPECT_EQ(p.find("only" + std::to_string(j)) != std::string::npos, i == j);
        }
    }
}

TEST_F(SandboxTest, SetupCommandsAreBaseline) {
    TaskInstance with_setup = instance_;
    with_setup.setup_commands = {"echo built > build.txt"};
    Workspace w = provision(with_setup, 1, tmp_ / "setup");
    EXPECT_EQ(read_file(w.root / "build.txt"), "built\n");
    EXPECT_EQ(extract_patch(w), "");
}

TEST_F(SandboxTest, FailingSetupIsInfraError) {
    TaskInstance bad = instance_;
    bad.setup_commands = {"exit 1"};
    EXPECT_THROW(provision(bad, 1, tmp_ / "bad"), InfraError);
}

TEST_F(SandboxTest, ProvisionFromGitRevision) {
    const fs::path repo = tmp_ / "gitsrc";
    fs::create_directories(repo);
    testing::write_text(repo / "f.txt", "v1\n");
    run_git(repo, {"init", "-q"});
    run_git(repo, {"add", "-A"});
    run_git(repo, {"commit", "-q", "-m", "one"});
    const std::string rev = run_git(repo, {"rev-parse", "HEAD"}).substr(0, 40);
    testing::write_text(repo / "f.txt", "v2\n");
    run_git(repo, {"commit", "-q", "-am", "two"});
    TaskInstance t = instance_;
    t.repo_source = repo;
    t.base_revision = rev;
    Workspace w = provision(t, 1, tmp_ / "fromgit");
    EXPECT_EQ(read_file(w.root / "f.txt"), "v1\n");
    EXPECT_EQ(extract_patch(w), "");
}

TEST_F(SandboxTest, BashEchoesOutputAndExitCode) {
    auto r = bash("echo hi");
    EXPECT_EQ(r.output, "hi\n");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_FALSE(r.timed_out);
    EXPECT_EQ(bash("echo oops >&2; exit 3").exit_code, 3);
    EXPECT_EQ(bash("echo oops >&2; exit 3").output, "oops\n");
}

TEST_F(SandboxTest, BashStateCarriesAcrossCalls) {
    bash("cd pkg && export GREETING=hello");
    EXPECT_EQ(bash("pwd").output, (ws_.root / "pkg").string() + "\n");
    EXPECT_EQ(bash("echo $GREETING").output, "hello\n");
}

TEST_F(SandboxTest, LeavingTheRootIsNotPersisted) {
    auto r = bash("cd / && pwd");
    EXPECT_NE(r.output.find("/\n"), std::string::npos);
    EXPECT_NE(r.output.find("outside the workspace"), std::string::npos);
    EXPECT_EQ(bash("pwd").output, ws_.root.string() + "\n");
}

TEST_F(SandboxTest, BashTimeoutKillsTheProcessGroup) {
    const auto started = std::chrono::steady_clock::now();
    auto r = bash("sleep 30 & sleep 30", 1);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    EXPECT_TRUE(r.timed_out);
    EXPECT_FALSE(r.exit_code.has_value());
    EXPECT_NE(r.output.find("timed out after 1s"), std::string::npos);
    EXPECT_LT(elapsed, 5.0);
}

TEST_F(SandboxTest, BackgroundChildrenDoNotOutliveTheCall) {
    const auto started = std::chrono::steady_clock::now();
    auto r = bash("(sleep 20 &) ; echo started", 10);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_LT(elapsed, 5.0);
}

TEST_F(SandboxTest, LongOutputIsTruncatedToTheCap) {
    settings_.observation_cap = 1000;
    auto r = bash("seq 1 100000");
    EXPECT_TRUE(r.truncated);
    EXPECT_LE(r.output.size(), 1000u);
    EXPECT_EQ(r.output.rfind("1\n2\n3\n", 0), 0u);
    EXPECT_NE(r.output.find("100000\n"), std::string::npos);
    EXPECT_NE(r.output.find("characters truncated"), std::string::npos);
}

TEST_F(SandboxTest, NonUtf8OutputIsRepaired) {
    auto r = bash("printf 'a\\377b'");
    EXPECT_TRUE(is_valid_utf8(r.output));
    EXPECT_EQ(r.output, "a\xEF\xBF\xBD" "b");
}

TEST_F(SandboxTest, StrReplaceEditsTheSingleOccurrence) {
    auto r = edit({EditAction::str_replace, "a.txt", "", "beta", "BETA", 0, std::nullopt});
    EXPECT_FALSE(r.error) << r.output;
    EXPECT_EQ(read_file(ws_.root / "a.txt"), "alpha\nBETA\ngamma\n");
    EXPECT_NE(r.output.find("BETA"), std::string::npos);
}

TEST_F(SandboxTest, StrReplaceRefusesZeroOrManyOccurrences) {
    const std::string before = tree_hash(ws_.root);
    auto none = edit({EditAction::str_replace, "a.txt", "", "delta", "x", 0, std::nullopt});
    EXPECT_TRUE(none.error);
    EXPECT_NE(none.output.find("0 occurrences"), std::string::npos);
    auto many = edit({EditAction::str_replace, "pkg/mod.py", "", "x = 1", "x = 3", 0, std::nullopt});
    EXPECT_TRUE(many.error);
    EXPECT_NE(many.output.find("2 occurrences"), std::string::npos);
    EXPECT_EQ(tree_hash(ws_.root), before);
}

TEST_F(SandboxTest, CreateNeverOverwrites) {
    const std::string before = tree_hash(ws_.root);
    auto r = edit({EditAction::create, "a.txt", "new\n", "", "", 0, std::nullopt});
    EXPECT_TRUE(r.error);
    EXPECT_EQ(tree_hash(ws_.root), before);
    auto ok = edit({EditAction::create, "fresh/dir/b.txt", "bee\n", "", "", 0, std::nullopt});
    EXPECT_FALSE(ok.error) << ok.output;
    EXPECT_EQ(read_file(ws_.root / "fresh/dir/b.txt"), "bee\n");
}

TEST_F(SandboxTest, InsertAfterLine) {
    EXPECT_FALSE(edit({EditAction::insert, "a.txt", "", "", "top", 0, std::nullopt}).error);
    EXPECT_FALSE(edit({EditAction::insert, "a.txt", "", "", "end\n", 4, std::nullopt}).error);
    EXPECT_EQ(read_file(ws_.root / "a.txt"), "top\nalpha\nbeta\ngamma\nend\n");
    EXPECT_TRUE(edit({EditAction::insert, "a.txt", "", "", "x", 99, std::nullopt}).error);
}

TEST_F(SandboxTest, ViewNumbersLinesAndListsDirectories) {
    auto file = edit({EditAction::view, "a.txt", "", "", "", 0, std::make_pair(2, 3)});
    EXPECT_EQ(file.output, "     2\tbeta\n     3\tgamma\n");
    EXPECT_FALSE(file.exit_code.has_value());
    auto dir = edit({EditAction::view, ".", "", "", "", 0, std::nullopt});
    EXPECT_NE(dir.output.find("pkg/sub/"), std::string::npos);
    EXPECT_EQ(dir.output.find("deep/leaf.txt"), std::string::npos);
    EXPECT_EQ(dir.output.find(".git"), std::string::npos);
    EXPECT_TRUE(edit({EditAction::view, "a.txt", "", "", "", 0, std::make_pair(3, 9)}).error);
}

TEST_F(SandboxTest, PathsCannotEscapeTheWorkspace) {
    fs::create_symlink("/etc", ws_.root / "etc-link");
    for (const char* path : {"../outside.txt", "/etc/hostname", "etc-link/hostname", ".git/config", "pkg/../../x"}) {
        auto r = edit({EditAction::create, path, "x", "", "", 0, std::nullopt});
        EXPECT_TRUE(r.error) << path;
        EXPECT_NE(r.output.find("inside the workspace"), std::string::npos) << path;
    }
    EXPECT_FALSE(fs::exists(tmp_ / "attempt1" / "outside.txt"));
    auto abs = edit({EditAction::view, (ws_.root / "a.txt").string(), "", "", "", 0, std::nullopt});
    EXPECT_FALSE(abs.error) << abs.output;
}

TEST_F(SandboxTest, OneLineEditGivesOneHunk) {
    bash("sed -i 's/beta/BETA/' a.txt");
    const std::string patch = extract_patch(ws_);
    EXPECT_FALSE(is_empty_patch(patch));
    std::size_t hunks = 0;
    for (std::size_t pos = 0; (pos = patch.find("\n@@ ", pos)) != std::string::npos; ++pos) ++hunks;
    EXPECT_EQ(hunks, 1u);
    EXPECT_NE(patch.find("-beta\n+BETA\n"), std::string::npos);
}

TEST_F(SandboxTest, AgentGitCommandsDoNotHideChanges) {
    bash("echo new > n.txt && git add -A && git commit -qm mine");
    const std::string patch = extract_patch(ws_);
    EXPECT_NE(patch.find("n.txt"), std::string::npos);
}

TEST_F(SandboxTest, IgnoredFilesStayOutOfThePatch) {
    bash("printf 'build/\\n' > .gitignore && mkdir -p build && echo o > build/out.o");
    const std::string patch = extract_patch(ws_);
    EXPECT_NE(patch.find(".gitignore"), std::string::npos);
    EXPECT_EQ(patch.find("out.o"), std::string::npos);
}

// is_empty_patch agrees with tree equality, and applying the patch to a
// pristine copy reproduces the edited tree.
TEST(PatchProperties, EmptinessMatchesTreeEqualityAndApplyRoundTrips) {
    std::mt19937_64 rng(77);
    TempDir tmp;
    TaskInstance inst = testing::make_instance(tmp / "src", "p", testing::sample_repo_files());
    for (int round = 0; round < 25; ++round) {
        const fs::path dir = tmp / ("r" + std::to_string(round));
        Workspace w = provision(inst, 1, dir / "edit");
        const int edits = std::uniform_int_distribution<int>(0, 3)(rng);
        std::string script;
        for (int i = 0; i < edits; ++i) script += testing::random_edit(rng, w.root) + "; ";
        const std::string patch = extract_patch(w);
        const bool same_tree = tree_snapshot(w.root) == tree_snapshot(inst.repo_source);
        EXPECT_EQ(is_empty_patch(patch), same_tree) << script << "\n" << patch;

        Workspace fresh = provision(inst, 1, dir / "apply");
        const ApplyResult applied = apply_patch(fresh.root, patch);
        ASSERT_TRUE(applied.ok) << applied.message << "\n" << script;
        EXPECT_EQ(tree_snapshot(fresh.root), tree_snapshot(w.root)) << script;
    }
}

TEST(PatchApply, RejectsPatchAgainstWrongContent) {
    TempDir tmp;
    TaskInstance inst = testing::make_instance(tmp / "src", "p", {{"f.txt", "one\n"}});
    Workspace w = provision(inst, 1, tmp / "a");
    const auto r = apply_patch(w.root, "diff --git a/f.txt b/f.txt\n--- a/f.txt\n+++ b/f.txt\n@@ -1 +1 @@\n-two\n+three\n");
    EXPECT_FALSE(r.ok);
    EXPECT_TRUE(apply_patch(w.root, "").ok);
}

TEST(Subprocess, TruncateKeepsHeadAndTailWithinCap) {
    std::string text(5000, 'x');
    text.replace(0, 4, "HEAD");
    text.replace(4996, 4, "TAIL");
    auto cut = truncate_output(text, text.size(), 300);
    EXPECT_TRUE(cut.truncated);
    EXPECT_LE(cut.text.size(), 300u);
    EXPECT_EQ(cut.text.rfind("HEAD", 0), 0u);
    EXPECT_EQ(cut.text.substr(cut.text.size() - 4), "TAIL");
    EXPECT_FALSE(truncate_output("short", 5, 300).truncated);
}

TEST(Subprocess, MissingProgramIsReported) {
    ProcessOptions opts;
    opts.argv = {"/nonexistent/program"};
    opts.cwd = fs::temp_directory_path();
    const ProcessResult r = run_process(opts);
    EXPECT_EQ(r.exit_code, 127);
}

}  // namespace
}  // namespace harness
