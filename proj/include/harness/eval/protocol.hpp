// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "harness/core/types.hpp"
#include "harness/eval/report.hpp"

namespace harness {

/// Runs and verifies one attempt. Returning status infra_error asks the
/// engine to retry; throwing Interrupted stops the run.
using AttemptExecutor = std::function<AttemptRecord(const TaskInstance&, int attempt_index, double temperature)>;

/// Completed attempts keyed by (instance, attempt index). With a file, every
/// put is appended as one summary line and earlier lines are loaded on
/// construction, which is how interrupted runs resume. Thread-safe.
class AttemptStore {
public:
    AttemptStore() = default;
    explicit AttemptStore(fs::path file);

    std::optional<AttemptRecord> find(const std::string& instance_id, int attempt_index) const;
    void put(const AttemptRecord& record);
    std::size_t size() const;

private:
    std::optional<fs::path> file_;
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, int>, AttemptRecord> records_;
};

/// Whether an instance whose latest attempt is `last` runs again. Resolved
/// attempts are never retried.
///   unresolved_or_empty_or_error  anything not resolved
///   empty_or_error                empty patch, agent_error or infra_error
///   unresolved_only               verified and unresolved (skips never-evaluated attempts)
bool should_retry(RetryPredicate predicate, const AttemptRecord& last);

struct ProtocolOptions {
    std::vector<double> temperatures{0.0, 0.1, 0.1};
    RetryPredicate predicate = RetryPredicate::unresolved_or_empty_or_error;
    int max_iterations = 50;
    int parallelism = 1;
    int infra_retries = 2;  // extra executions of an infra_error attempt, same slot
    const std::atomic<bool>* cancel = nullptr;
    std::function<void(const AttemptRecord&)> on_attempt;  // after each newly executed attempt
};

struct IterativeResult {
    std::vector<InstanceOutcome> outcomes;  // suite order
    EvalReport report;
};

/// Iteration 1 runs the whole suite at temperatures[0]; iteration i > 1 runs
/// the instances of iteration i-1 selected by the predicate, at
/// temperatures[i-1]. Attempts already in `store` are reused.
/// Throws Interrupted when `cancel` fires before every attempt has run.
IterativeResult run_iterative(const std::vector<TaskInstance>& suite, const ProtocolOptions& options,
                              const AttemptExecutor& executor, AttemptStore& store);

struct SweepResult {
    double temperature = 0.0;
    std::vector<std::vector<AttemptRecord>> attempts;  // [instance][sample]
    std::vector<std::vector<bool>> matrix;             // resolved flags, same shape
};

/// `samples` independent attempts per instance at one fixed temperature
/// (attempt indices 1..samples). options.temperatures is ignored.
SweepResult run_sweep(const std::vector<TaskInstance>& suite, double temperature, int samples,
                      const ProtocolOptions& options, const AttemptExecutor& executor, AttemptStore& store);

/// Runs fn(0..count-1) on up to `parallelism` threads. Stops handing out
/// work once `cancel` is set or a call throws; rethrows the first exception,
/// or Interrupted when work was left undone because of `cancel`.
void parallel_for(std::size_t count, int parallelism, const std::atomic<bool>* cancel,
                  const std::function<void(std::size_t)>& fn);

}  // namespace harness
