// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

namespace harness {

/// n samples per instance, c of them successful, query size k.
struct PassAtKQuery {
    int n = 0;
    int c = 0;
    int k = 1;
};

/// Unbiased estimate of the probability that at least one of k samples drawn
/// without replacement from the n succeeds: 1 - C(n-c, k) / C(n, k), in
/// product form. Throws ValidationError unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(const PassAtKQuery& query);

/// How a success matrix is reduced to a pass@k value.
///   unbiased: mean over instances of pass_at_k(n, c, k)
///   first_k:  fraction of instances with a success among their first k samples
enum class PassAtKEstimator { unbiased, first_k };
std::string_view to_string(PassAtKEstimator estimator);
PassAtKEstimator pass_at_k_estimator_from_string(std::string_view text);

/// Success matrix: one row per instance, one column per sample, all rows of
/// equal length n. Returns 0 for an empty matrix.
double aggregate_pass_at_k(const std::vector<std::vector<bool>>& matrix, int k, PassAtKEstimator estimator);

}  // namespace harness
