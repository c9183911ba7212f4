// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <string>
#include <string_view>

#include "harness/core/types.hpp"

namespace harness {

/// Expands the instance's test command template for one test id. The id is
/// shell-quoted.
std::string test_command(const TaskInstance& instance, std::string_view test_id);

/// Applies `patch` to a freshly provisioned copy of the instance under
/// `scratch_dir` and runs every fail_to_pass and pass_to_pass test there.
/// resolved iff the patch applies and every test passes. The scratch copy is
/// removed afterwards.
///
/// Throws InfraError when the copy cannot be provisioned and Interrupted
/// when `cancel` fires.
VerificationResult verify(const TaskInstance& instance, std::string_view patch, const fs::path& scratch_dir,
                          const std::atomic<bool>* cancel = nullptr);

}  // namespace harness
