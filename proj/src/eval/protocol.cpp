// SPDX-License-Identifier: Apache-2.0
#include "harness/eval/protocol.hpp"

#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"

namespace harness {

AttemptStore::AttemptStore(fs::path file) : file_(std::move(file)) {
    std::ifstream in(*file_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            if (in.peek() == std::char_traits<char>::eof()) break;  // torn final line
            throw ValidationError(fmt::format("{}: malformed outcome record", file_->string()));
        }
        AttemptRecord r = attempt_summary_from_json(j);
        records_[{r.instance_id, r.attempt_index}] = std::move(r);
    }
}

std::optional<AttemptRecord> AttemptStore::find(const std::string& instance_id, int attempt_index) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find({instance_id, attempt_index});
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

void AttemptStore::put(const AttemptRecord& record) {
    std::lock_guard lock(mutex_);
    if (file_) {
        std::ofstream out(*file_, std::ios::app);
        out << attempt_summary_to_json(record).dump() << '\n';
        out.flush();
        if (!out) throw InfraError(fmt::format("cannot append to {}", file_->string()));
    }
    records_[{record.instance_id, record.attempt_index}] = record;
}

std::size_t AttemptStore::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

bool should_retry(RetryPredicate predicate, const AttemptRecord& last) {
    if (last.is_resolved()) return false;
    const bool error = last.status == AttemptStatus::agent_error || last.status == AttemptStatus::infra_error;
    switch (predicate) {
        case RetryPredicate::unresolved_or_empty_or_error: return true;
        case RetryPredicate::empty_or_error: return error || last.patch_empty();
        case RetryPredicate::unresolved_only: return last.resolved == Resolution::unresolved;
    }
    return true;
}

void parallel_for(std::size_t count, int parallelism, const std::atomic<bool>* cancel,
                  const std::function<void(std::size_t)>& fn) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            if (cancel != nullptr && cancel->load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
            }
        }
    };

    const auto workers = static_cast<std::size_t>(std::max(1, parallelism));
    if (workers == 1 || count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < std::min(workers, count); ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    if (next.load() < count) throw Interrupted("run interrupted");
}

namespace {

AttemptRecord obtain(const TaskInstance& instance, int attempt_index, double temperature,
                     const ProtocolOptions& options, const AttemptExecutor& executor, AttemptStore& store) {
    if (auto done = store.find(instance.id, attempt_index)) return *done;
    AttemptRecord record;
    for (int tries = 0; tries <= options.infra_retries; ++tries) {
        if (tries > 0) {
            if (options.cancel != nullptr && options.cancel->load()) throw Interrupted("run interrupted");
            spdlog::warn("{} attempt {}: infra error ({}), retry {}/{}", instance.id, attempt_index,
                         record.error_detail, tries, options.infra_retries);
        }
        try {
            record = executor(instance, attempt_index, temperature);
        } catch (const InfraError& e) {
            record = AttemptRecord{};
            record.instance_id = instance.id;
            record.attempt_index = attempt_index;
            record.temperature = temperature;
            record.max_iterations = options.max_iterations;
            record.status = AttemptStatus::infra_error;
            record.error_detail = e.what();
        }
        if (record.status != AttemptStatus::infra_error) break;
    }
    store.put(record);
    if (options.on_attempt) options.on_attempt(record);
    return record;
}

}  // namespace

IterativeResult run_iterative(const std::vector<TaskInstance>& suite, const ProtocolOptions& options,
                              const AttemptExecutor& executor, AttemptStore& store) {
    if (options.temperatures.empty()) throw ConfigError("temperature schedule is empty");
    IterativeResult result;
    result.outcomes.resize(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) result.outcomes[i].instance_id = suite[i].id;

    std::vector<std::size_t> current(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) current[i] = i;

    for (std::size_t it = 0; it < options.temperatures.size(); ++it) {
        const int attempt_index = static_cast<int>(it) + 1;
        if (it > 0) {
            std::vector<std::size_t> selected;
            for (auto idx : current) {
                if (should_retry(options.predicate, result.outcomes[idx].attempts.back())) selected.push_back(idx);
            }
            current = std::move(selected);
        }
        spdlog::info("iteration {}: {} instances at temperature {}", attempt_index, current.size(),
                     options.temperatures[it]);
        std::vector<AttemptRecord> records(current.size());
        parallel_for(current.size(), options.parallelism, options.cancel, [&](std::size_t j) {
            records[j] = obtain(suite[current[j]], attempt_index, options.temperatures[it], options, executor, store);
        });
        for (std::size_t j = 0; j < current.size(); ++j) {
            result.outcomes[current[j]].attempts.push_back(std::move(records[j]));
        }
    }
    result.report = build_iterative_report(result.outcomes, options.temperatures, options.max_iterations,
                                           options.predicate);
    return result;
}

SweepResult run_sweep(const std::vector<TaskInstance>& suite, double temperature, int samples,
                      const ProtocolOptions& options, const AttemptExecutor& executor, AttemptStore& store) {
    if (samples < 1) throw ConfigError("samples must be at least 1");
    SweepResult result;
    result.temperature = temperature;
    result.attempts.assign(suite.size(), std::vector<AttemptRecord>(static_cast<std::size_t>(samples)));
    const std::size_t n = static_cast<std::size_t>(samples);
    parallel_for(suite.size() * n, options.parallelism, options.cancel, [&](std::size_t job) {
        const std::size_t i = job / n;
        const std::size_t s = job % n;
        result.attempts[i][s] = obtain(suite[i], static_cast<int>(s) + 1, temperature, options, executor, store);
    });
    for (const auto& row : result.attempts) {
        std::vector<bool> flags;
        for (const auto& a : row) flags.push_back(a.is_resolved());
        result.matrix.push_back(std::move(flags));
    }
    return result;
}

}  // namespace harness
