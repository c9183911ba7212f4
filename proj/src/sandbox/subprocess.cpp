// SPDX-License-Identifier: Apache-2.0
#include "harness/sandbox/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "harness/core/errors.hpp"

namespace harness {

namespace {

using Clock = std::chrono::steady_clock;

// Keeps the first and last `limit` bytes of a stream.
class OutputCapture {
public:
    explicit OutputCapture(std::size_t limit) : limit_(limit) {}

    void append(const char* data, std::size_t n) {
        total_ += n;
        std::size_t to_head = std::min(n, limit_ - std::min(limit_, head_.size()));
        head_.append(data, to_head);
        if (to_head == n) return;
        tail_.append(data + to_head, n - to_head);
        if (tail_.size() > 2 * limit_) tail_.erase(0, tail_.size() - limit_);
    }

    std::string take() {
        if (tail_.size() > limit_) tail_.erase(0, tail_.size() - limit_);
        return head_ + tail_;
    }
    std::size_t total() const { return total_; }

private:
    std::size_t limit_;
    std::size_t total_ = 0;
    std::string head_;
    std::string tail_;
};

void kill_group(pid_t pid) { ::kill(-pid, SIGKILL); }

bool read_available(int fd, OutputCapture& capture) {
    char buf[65536];
    while (true) {
        ssize_t n = ::read(fd, buf, sizeof buf);
        if (n > 0) {
            capture.append(buf, static_cast<std::size_t>(n));
            continue;
        }
        if (n == 0) return false;  // EOF
        if (errno == EINTR) continue;
        return true;               // EAGAIN
    }
}

}  // namespace

ProcessResult run_process(const ProcessOptions& options) {
    if (options.argv.empty()) throw InfraError("run_process: empty argv");

    std::vector<char*> argv;
    for (const auto& a : options.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    std::vector<char*> envp;
    for (const auto& e : options.env) envp.push_back(const_cast<char*>(e.c_str()));
    envp.push_back(nullptr);
    const std::string cwd = options.cwd.string();

    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0) throw InfraError(fmt::format("pipe failed: {}", std::strerror(errno)));

    const auto started = Clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw InfraError(fmt::format("fork failed: {}", std::strerror(errno)));
    }
    if (pid == 0) {
        // Child: only async-signal-safe calls from here on.
        ::setpgid(0, 0);
        for (int sig : {SIGPIPE, SIGINT, SIGTERM, SIGCHLD}) ::signal(sig, SIG_DFL);
        sigset_t none;
        sigemptyset(&none);
        ::sigprocmask(SIG_SETMASK, &none, nullptr);
        int devnull = ::open("/dev/null", O_RDONLY);
        if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
        ::dup2(fds[1], STDOUT_FILENO);
        ::dup2(fds[1], STDERR_FILENO);
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(126);
        ::execvpe(argv[0], argv.data(), envp.data());
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    ::fcntl(fds[0], F_SETFL, ::fcntl(fds[0], F_GETFL) | O_NONBLOCK);

    OutputCapture capture(options.capture_limit);
    ProcessResult result;
    const bool has_deadline = options.timeout.count() > 0;
    const auto deadline = started + options.timeout;
    bool pipe_open = true;
    int status = 0;
    bool exited = false;

    while (!exited) {
        if (pipe_open) {
            pollfd pfd{fds[0], POLLIN, 0};
            ::poll(&pfd, 1, 20);
            if (pfd.revents & (POLLIN | POLLHUP | POLLERR)) pipe_open = read_available(fds[0], capture);
        } else {
            ::usleep(5000);
        }
        pid_t w = ::waitpid(pid, &status, WNOHANG);
        if (w == pid) {
            exited = true;
            break;
        }
        const bool cancel = options.cancel && options.cancel->load();
        if (cancel || (has_deadline && Clock::now() >= deadline)) {
            kill_group(pid);
            ::waitpid(pid, &status, 0);
            result.timed_out = !cancel;
            result.cancelled = cancel;
            exited = true;
        }
    }

    // Stray background processes would hold the pipe open forever.
    kill_group(pid);
    const auto drain_deadline = Clock::now() + std::chrono::milliseconds(500);
    while (pipe_open && Clock::now() < drain_deadline) {
        pollfd pfd{fds[0], POLLIN, 0};
        ::poll(&pfd, 1, 20);
        if (pfd.revents & (POLLIN | POLLHUP | POLLERR)) pipe_open = read_available(fds[0], capture);
    }
    ::close(fds[0]);

    if (!result.timed_out && !result.cancelled) {
        if (WIFEXITED(status)) {
            result.exit_code = WEXITSTATUS(status);
        } else if (WIFSIGNALED(status)) {
            result.exit_code = 128 + WTERMSIG(status);
        }
    }
    result.total_bytes = capture.total();
    result.output = capture.take();
    result.wall_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    return result;
}

namespace {

// Moves `pos` back to the start of a UTF-8 sequence.
std::size_t utf8_floor(const std::string& s, std::size_t pos) {
    while (pos > 0 && pos < s.size() && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) --pos;
    return pos;
}

}  // namespace

Truncated truncate_output(const std::string& output, std::size_t total_bytes, std::size_t cap) {
    if (total_bytes <= cap && output.size() <= cap) return {output, false};
    // The marker's length depends on the omitted count, which depends on the
    // marker's length; iterate until stable.
    std::string marker;
    std::size_t head = 0;
    std::size_t tail = 0;
    for (std::size_t marker_len = 48;;) {
        const std::size_t body = cap > marker_len ? cap - marker_len : 0;
        head = body / 2;
        tail = body - head;
        marker = fmt::format("\n[... {} characters truncated ...]\n", total_bytes - head - tail);
        if (marker.size() <= marker_len) break;
        marker_len = marker.size();
    }
    head = std::min(head, output.size());
    tail = std::min(tail, output.size() - head);
    const std::size_t head_end = utf8_floor(output, head);
    std::size_t tail_start = std::max(head_end, output.size() - tail);
    while (tail_start < output.size() && (static_cast<unsigned char>(output[tail_start]) & 0xC0) == 0x80) ++tail_start;
    std::string text = output.substr(0, head_end) + marker + output.substr(tail_start);
    return {std::move(text), true};
}

}  // namespace harness
