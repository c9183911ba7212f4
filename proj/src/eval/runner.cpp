// SPDX-License-Identifier: Apache-2.0
#include "harness/eval/runner.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "harness/agent/episode.hpp"
#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"
#include "harness/core/util.hpp"
#include "harness/eval/verify.hpp"

namespace harness {

fs::path attempt_directory(const fs::path& root, const std::string& instance_id, int attempt_index) {
    return root / "instances" / instance_id / fmt::format("attempt{}", attempt_index);
}

AttemptExecutor make_episode_executor(std::shared_ptr<Backend> backend, const RunConfig& config,
                                      const fs::path& output_dir, const std::atomic<bool>* cancel) {
    return [backend = std::move(backend), config, output_dir, cancel](const TaskInstance& instance, int attempt_index,
                                                                     double temperature) {
        EpisodeOptions opts;
        opts.attempt_index = attempt_index;
        opts.params.temperature = temperature;
        opts.params.max_output_tokens = config.max_output_tokens;
        opts.budget.max_iterations = config.max_iterations;
        opts.tools = config.tools;
        opts.strike_limit = config.strike_limit;
        opts.attempt_dir = attempt_directory(output_dir, instance.id, attempt_index);
        opts.keep_workspace = config.keep_workspaces;
        opts.cancel = cancel;

        AttemptRecord record = run_episode(instance, *backend, opts);
        if (record.status == AttemptStatus::infra_error) {
            spdlog::warn("{} attempt {}: {}", instance.id, attempt_index, record.error_detail);
            return record;
        }
        try {
            record.verification = verify(instance, record.patch, opts.attempt_dir / "verify", cancel);
            record.resolved = record.verification->resolved ? Resolution::resolved : Resolution::unresolved;
        } catch (const InfraError& e) {
            record.status = AttemptStatus::infra_error;
            record.error_detail = fmt::format("verification failed: {}", to_valid_utf8(e.what()));
        }
        write_file_atomic(opts.attempt_dir / "summary.json", attempt_summary_to_json(record).dump(2) + "\n");
        spdlog::info("{} attempt {} (T={}): {} in {} turns, {}", instance.id, attempt_index, format_decimal(temperature),
                     to_string(record.status), record.assistant_turns, to_string(record.resolved));
        return record;
    };
}

}  // namespace harness
