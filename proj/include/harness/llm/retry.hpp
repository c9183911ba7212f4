// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>

namespace harness {

/// Capped exponential backoff for transient transport failures.
struct BackoffPolicy {
    int max_retries = 3;
    std::chrono::milliseconds initial_delay{500};
    std::chrono::milliseconds max_delay{8000};
    double multiplier = 2.0;

    /// Delay before retry number `retry` (1-based).
    std::chrono::milliseconds delay_for(int retry) const {
        const double raw = static_cast<double>(initial_delay.count()) * std::pow(multiplier, retry - 1);
        const double capped = std::min(raw, static_cast<double>(max_delay.count()));
        return std::chrono::milliseconds(static_cast<long long>(capped));
    }
};

}  // namespace harness
