// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <mutex>
#include <utility>

#include "harness/llm/backend.hpp"

namespace harness {

/// Re-emits the assistant turns recorded in event logs. The incoming
/// conversation must equal the recorded prefix (workspace roots normalised);
/// any divergence raises ReplayMismatch.
///
/// `source` is either one event-log file (used for every episode) or a run
/// directory laid out as instances/<id>/attempt<k>/events.jsonl.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(fs::path source);

    Completion complete(const CallContext& context, const std::vector<ChatMessage>& messages,
                        const std::vector<ToolSpec>& tools, const SamplingParams& params) override;
    std::string model_name() const override { return "replay"; }

private:
    struct Recording {
        std::vector<ChatMessage> messages;
        std::vector<TokenUsage> turn_usage;
        std::string workspace_root;
    };

    const Recording& recording_for(const CallContext& context);

    fs::path source_;
    std::mutex mutex_;
    std::map<std::pair<std::string, int>, Recording> cache_;
};

}  // namespace harness
