// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <string>
#include <vector>

namespace harness {

/// Parses arguments (argv[0] included) and runs the chosen subcommand.
/// Returns the exit code; never throws.
int run_cli(const std::vector<std::string>& args, std::atomic<bool>* cancel = nullptr);

}  // namespace harness
