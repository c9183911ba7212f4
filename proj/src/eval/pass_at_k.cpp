// SPDX-License-Identifier: Apache-2.0
#include "harness/eval/pass_at_k.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "harness/core/errors.hpp"

namespace harness {

double pass_at_k(const PassAtKQuery& q) {
    if (q.n < 1 || q.c < 0 || q.c > q.n || q.k < 1 || q.k > q.n) {
        throw ValidationError(fmt::format("invalid pass@k query n={} c={} k={}", q.n, q.c, q.k));
    }
    if (q.n - q.c < q.k) return 1.0;
    // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k / i)
    double miss = 1.0;
    for (int i = q.n - q.c + 1; i <= q.n; ++i) miss *= 1.0 - static_cast<double>(q.k) / i;
    return 1.0 - miss;
}

std::string_view to_string(PassAtKEstimator estimator) {
    return estimator == PassAtKEstimator::unbiased ? "unbiased" : "first_k";
}

PassAtKEstimator pass_at_k_estimator_from_string(std::string_view text) {
    if (text == "unbiased") return PassAtKEstimator::unbiased;
    if (text == "first_k") return PassAtKEstimator::first_k;
    throw ConfigError(fmt::format("unknown pass@k estimator '{}' (expected unbiased or first_k)", text));
}

double aggregate_pass_at_k(const std::vector<std::vector<bool>>& matrix, int k, PassAtKEstimator estimator) {
    if (matrix.empty()) return 0.0;
    const int n = static_cast<int>(matrix.front().size());
    double total = 0.0;
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != n) throw ValidationError("success matrix rows differ in length");
        if (estimator == PassAtKEstimator::unbiased) {
            total += pass_at_k({n, static_cast<int>(std::count(row.begin(), row.end(), true)), k});
        } else {
            if (k < 1 || k > n) throw ValidationError(fmt::format("invalid pass@k query n={} k={}", n, k));
            total += std::any_of(row.begin(), row.begin() + k, [](bool b) { return b; }) ? 1.0 : 0.0;
        }
    }
    return total / static_cast<double>(matrix.size());
}

}  // namespace harness
