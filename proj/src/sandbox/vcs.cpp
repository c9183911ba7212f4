// SPDX-License-Identifier: Apache-2.0
#include "harness/sandbox/vcs.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/subprocess.hpp"

namespace harness {

namespace {

std::vector<std::string> git_environment(const std::vector<std::string>& extra) {
    std::vector<std::string> env{
        "GIT_CONFIG_NOSYSTEM=1",
        "GIT_CONFIG_GLOBAL=/dev/null",
        "GIT_AUTHOR_NAME=harness",
        "GIT_AUTHOR_EMAIL=harness@localhost",
        "GIT_COMMITTER_NAME=harness",
        "GIT_COMMITTER_EMAIL=harness@localhost",
        "GIT_AUTHOR_DATE=2000-01-01T00:00:00Z",
        "GIT_COMMITTER_DATE=2000-01-01T00:00:00Z",
        "GIT_TERMINAL_PROMPT=0",
        "LC_ALL=C",
        "TZ=UTC",
    };
    if (const char* path = std::getenv("PATH")) env.push_back(std::string("PATH=") + path);
    env.insert(env.end(), extra.begin(), extra.end());
    return env;
}

}  // namespace

std::string run_git(const fs::path& repo, const std::vector<std::string>& args, const std::vector<std::string>& extra_env) {
    ProcessOptions opts;
    opts.argv = {"git",
                 "-c", "core.autocrlf=false",
                 "-c", "core.safecrlf=false",
                 "-c", "core.fileMode=true",
                 "-c", "core.quotePath=true",
                 "-c", "commit.gpgSign=false",
                 "-c", "init.defaultBranch=main",
                 "-c", "advice.detachedHead=false",
                 "-c", "safe.directory=*"};
    opts.argv.insert(opts.argv.end(), args.begin(), args.end());
    opts.cwd = repo;
    opts.env = git_environment(extra_env);
    opts.timeout = std::chrono::minutes(5);
    opts.capture_limit = 64 << 20;
    ProcessResult r = run_process(opts);
    if (!r.ok()) {
        std::string cmd = "git";
        for (const auto& a : args) cmd += " " + a;
        throw InfraError(fmt::format("`{}` failed in {} (exit {}): {}", cmd, repo.string(),
                                     r.exit_code ? std::to_string(*r.exit_code) : "none",
                                     r.output.substr(0, 2000)));
    }
    return std::move(r.output);
}

std::string extract_patch(const Workspace& ws) {
    fs::create_directories(ws.shell_state);
    const fs::path index = fs::absolute(ws.shell_state / "patch.index");
    std::error_code ec;
    fs::remove(index, ec);
    const std::vector<std::string> env{"GIT_INDEX_FILE=" + index.string()};
    run_git(ws.root, {"read-tree", ws.baseline}, env);
    run_git(ws.root, {"add", "-A", "--", "."}, env);
    std::string diff = run_git(ws.root, {"diff", "--cached", "--binary", "--no-color", "--no-ext-diff", "--no-renames",
                                         "--no-textconv", ws.baseline, "--"},
                               env);
    fs::remove(index, ec);
    return diff;
}

ApplyResult apply_patch(const fs::path& root, std::string_view patch) {
    if (patch.find_first_not_of(" \t\r\n") == std::string_view::npos) return {true, "blank patch"};
    const fs::path file = fs::absolute(root).parent_path() / fmt::format(".apply-{}.patch", ::getpid());
    write_file_atomic(file, patch);
    ApplyResult result;
    try {
        run_git(root, {"apply", "--binary", "--whitespace=nowarn", file.string()});
        result = {true, "applied"};
    } catch (const InfraError& e) {
        result = {false, e.what()};
    }
    std::error_code ec;
    fs::remove(file, ec);
    return result;
}

}  // namespace harness
