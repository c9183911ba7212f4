// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "harness/core/types.hpp"

namespace harness {

struct ProcessOptions {
    std::vector<std::string> argv;
    fs::path cwd;
    std::vector<std::string> env;          // KEY=VALUE; replaces the parent environment
    std::chrono::milliseconds timeout{0};  // 0 = no limit
    const std::atomic<bool>* cancel = nullptr;
    std::size_t capture_limit = 1 << 20;   // bytes kept from each end of the output
};

struct ProcessResult {
    /// stdout and stderr interleaved. When the process wrote more than twice
    /// capture_limit bytes, holds the first and last capture_limit bytes.
    std::string output;
    std::size_t total_bytes = 0;
    std::optional<int> exit_code;  // none when killed for timeout or cancellation
    bool timed_out = false;
    bool cancelled = false;
    double wall_seconds = 0.0;

    bool ok() const { return exit_code && *exit_code == 0; }
};

/// Runs argv[0] (PATH lookup) in its own process group with stdin at
/// /dev/null. On timeout or cancellation the whole group is killed; once the
/// main process exits, leftover background members are killed too.
/// Throws InfraError when the process cannot be started.
ProcessResult run_process(const ProcessOptions& options);

struct Truncated {
    std::string text;
    bool truncated = false;
};

/// Caps `output` (whose untruncated length was `total_bytes`) at `cap` bytes,
/// keeping head and tail halves around a marker. The result never exceeds cap.
Truncated truncate_output(const std::string& output, std::size_t total_bytes, std::size_t cap);

}  // namespace harness
