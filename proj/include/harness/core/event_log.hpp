// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <iosfwd>
#include <string>

#include "harness/core/types.hpp"

namespace harness {

// Event logs are line-delimited JSON: one header record carrying
// instance_id, attempt_index, temperature and workspace_root, followed by
// one record per event in index order.

/// Writes the whole trajectory. Throws InfraError if the sink fails.
void serialize_event_log(const Trajectory& trajectory, std::ostream& out);
std::string serialize_event_log(const Trajectory& trajectory);

/// Reads a log written by serialize_event_log or EventLogWriter. A torn final
/// line (crash mid-write) is ignored. Throws ValidationError on malformed
/// records or non-contiguous indices.
Trajectory deserialize_event_log(std::istream& in);
Trajectory deserialize_event_log(const std::string& text);
Trajectory read_event_log(const fs::path& path);

/// Append-only writer used while an episode runs; every record is flushed
/// as soon as it is written. Exclusive per attempt.
class EventLogWriter {
public:
    EventLogWriter(const fs::path& path, const Trajectory& header);
    EventLogWriter(const EventLogWriter&) = delete;
    EventLogWriter& operator=(const EventLogWriter&) = delete;

    void append(const Event& event);

private:
    void write_line(const std::string& line);

    fs::path path_;
    std::ofstream out_;
};

}  // namespace harness
