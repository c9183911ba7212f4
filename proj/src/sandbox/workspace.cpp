// SPDX-License-Identifier: Apache-2.0
#include "harness/sandbox/workspace.hpp"

#include <algorithm>
#include <cstdlib>
#include <sys/stat.h>
#include <sys/time.h>

#include <fmt/format.h>

#include "harness/core/errors.hpp"
#include "harness/core/hash.hpp"
#include "harness/core/util.hpp"
#include "harness/sandbox/subprocess.hpp"
#include "harness/sandbox/vcs.hpp"

namespace harness {

namespace {

constexpr std::chrono::seconds kSetupTimeout{600};

bool is_archive(const fs::path& p) {
    const std::string name = p.filename().string();
    for (std::string_view ext : {".tar", ".tar.gz", ".tgz", ".tar.bz2", ".tar.xz"}) {
        if (name.size() > ext.size() && name.compare(name.size() - ext.size(), ext.size(), ext) == 0) return true;
    }
    return false;
}

void materialise(const TaskInstance& instance, const fs::path& root) {
    const fs::path& src = instance.repo_source;
    std::error_code ec;
    if (fs::is_directory(src, ec)) {
        if (fs::exists(src / ".git") && !instance.base_revision.empty()) {
            run_git(root.parent_path(), {"clone", "--quiet", "--no-checkout", "--no-hardlinks", fs::absolute(src).string(),
                                         root.filename().string()});
            run_git(root, {"checkout", "--quiet", "--detach", instance.base_revision});
            run_git(root, {"remote", "remove", "origin"});
            return;
        }
        fs::create_directories(root);
        for (const auto& entry : fs::directory_iterator(src)) {
            if (entry.path().filename() == ".git") continue;
            fs::copy(entry.path(), root / entry.path().filename(),
                     fs::copy_options::recursive | fs::copy_options::copy_symlinks, ec);
            if (ec) throw InfraError(fmt::format("copying {} failed: {}", entry.path().string(), ec.message()));
        }
        return;
    }
    if (fs::is_regular_file(src, ec) && is_archive(src)) {
        fs::create_directories(root);
        ProcessOptions opts;
        opts.argv = {"tar", "-xf", fs::absolute(src).string(), "-C", root.string()};
        if (const char* path = std::getenv("PATH")) opts.env.push_back(std::string("PATH=") + path);
        opts.timeout = kSetupTimeout;
        auto r = run_process(opts);
        if (!r.ok()) throw InfraError(fmt::format("unpacking {} failed: {}", src.string(), r.output));
        return;
    }
    throw InfraError(fmt::format("repo_source {} is neither a directory nor a tar archive", src.string()));
}

void set_mtime(const fs::path& p) {
    const timeval times[2] = {{kNormalizedMtime, 0}, {kNormalizedMtime, 0}};
    ::lutimes(p.c_str(), times);
}

void normalise_mtimes(const fs::path& root) {
    std::vector<fs::path> dirs;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        if (it->path().filename() == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        if (it->is_directory() && !it->is_symlink()) {
            dirs.push_back(it->path());
        } else {
            set_mtime(it->path());
        }
    }
    // Directories last, deepest first, since touching children changes them.
    std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) { return a.string() > b.string(); });
    for (const auto& d : dirs) set_mtime(d);
    set_mtime(root);
}

}  // namespace

std::vector<std::string> sandbox_environment(const Workspace& ws) {
    std::vector<std::string> env{
        "HOME=" + ws.root.string(),
        "LC_ALL=C.UTF-8",
        "LANG=C.UTF-8",
        "TZ=UTC",
        "TERM=dumb",
        "PAGER=cat",
        "GIT_PAGER=cat",
        "PYTHONDONTWRITEBYTECODE=1",
        "PYTHONHASHSEED=0",
        "GIT_CONFIG_NOSYSTEM=1",
        "GIT_AUTHOR_NAME=agent",
        "GIT_AUTHOR_EMAIL=agent@localhost",
        "GIT_COMMITTER_NAME=agent",
        "GIT_COMMITTER_EMAIL=agent@localhost",
    };
    if (const char* path = std::getenv("PATH")) env.push_back(std::string("PATH=") + path);
    return env;
}

Workspace provision(const TaskInstance& instance, int attempt_index, const fs::path& attempt_dir) {
    Workspace ws;
    ws.instance_id = instance.id;
    ws.attempt_index = attempt_index;
    ws.root = fs::absolute(attempt_dir / "workspace").lexically_normal();
    ws.shell_state = fs::absolute(attempt_dir / ".shell").lexically_normal();

    std::error_code ec;
    fs::remove_all(ws.root, ec);
    fs::remove_all(ws.shell_state, ec);
    fs::create_directories(ws.root.parent_path());
    fs::create_directories(ws.shell_state);

    materialise(instance, ws.root);

    for (const auto& command : instance.setup_commands) {
        ProcessOptions opts;
        opts.argv = {"bash", "-c", command};
        opts.cwd = ws.root;
        opts.env = sandbox_environment(ws);
        opts.timeout = kSetupTimeout;
        auto r = run_process(opts);
        if (!r.ok()) {
            throw InfraError(fmt::format("setup command `{}` for '{}' failed (exit {}): {}", command, instance.id,
                                         r.exit_code ? std::to_string(*r.exit_code) : "timeout",
                                         truncate_output(r.output, r.total_bytes, 2000).text));
        }
    }

    normalise_mtimes(ws.root);

    const bool cloned = fs::exists(ws.root / ".git");
    if (!cloned) run_git(ws.root, {"init", "--quiet"});
    run_git(ws.root, {"add", "-A", "--", "."});
    const bool dirty = !run_git(ws.root, {"status", "--porcelain"}).empty();
    if (!cloned || dirty) run_git(ws.root, {"commit", "--quiet", "--allow-empty", "--no-verify", "-m", "baseline"});
    std::string head = run_git(ws.root, {"rev-parse", "HEAD"});
    while (!head.empty() && (head.back() == '\n' || head.back() == '\r')) head.pop_back();
    ws.baseline = head;

    write_file_atomic(ws.shell_state / "cwd", ws.root.string());
    return ws;
}

void teardown(const Workspace& ws) {
    std::error_code ec;
    fs::remove_all(ws.root, ec);
    fs::remove_all(ws.shell_state, ec);
}

std::optional<fs::path> resolve_in_workspace(const Workspace& ws, std::string_view path) {
    if (path.empty()) return std::nullopt;
    fs::path p{std::string(path)};
    if (p.is_relative()) p = ws.root / p;
    std::error_code ec;
    const fs::path root = fs::weakly_canonical(ws.root, ec);
    if (ec) return std::nullopt;
    const fs::path resolved = fs::weakly_canonical(p, ec);
    if (ec) return std::nullopt;
    const fs::path rel = resolved.lexically_relative(root);
    if (rel.empty()) return std::nullopt;
    auto first = rel.begin();
    if (*first == ".." || *first == ".git") return std::nullopt;
    return resolved;
}

std::map<std::string, std::string> tree_snapshot(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
        if (it->path().filename() == ".git") {
            it.disable_recursion_pending();
            continue;
        }
        const std::string rel = it->path().lexically_relative(root).generic_string();
        if (it->is_symlink()) {
            out[rel] = "link:" + fs::read_symlink(it->path()).string();
        } else if (it->is_regular_file()) {
            out[rel] = sha256_file(it->path());
        }
    }
    return out;
}

std::string tree_hash(const fs::path& root) {
    std::string manifest;
    for (const auto& [path, digest] : tree_snapshot(root)) manifest += path + '\0' + digest + '\n';
    return sha256_hex(manifest);
}

}  // namespace harness
