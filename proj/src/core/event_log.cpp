// SPDX-License-Identifier: Apache-2.0
#include "harness/core/event_log.hpp"

#include <istream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "harness/core/errors.hpp"
#include "harness/core/json_io.hpp"

namespace harness {

using nlohmann::json;

namespace {

constexpr int kLogFormatVersion = 1;

json header_record(const Trajectory& t) {
    return json{{"record", "header"},
                {"format", kLogFormatVersion},
                {"instance_id", t.instance_id},
                {"attempt_index", t.attempt_index},
                {"temperature", t.temperature},
                {"workspace_root", t.workspace_root}};
}

json event_record(const Event& e) {
    json j = e;
    j["record"] = "event";
    return j;
}

}  // namespace

void serialize_event_log(const Trajectory& trajectory, std::ostream& out) {
    out << header_record(trajectory).dump() << '\n';
    for (const auto& e : trajectory.events) out << event_record(e).dump() << '\n';
    out.flush();
    if (!out) throw InfraError("event log sink is not writable");
}

std::string serialize_event_log(const Trajectory& trajectory) {
    std::ostringstream ss;
    serialize_event_log(trajectory, ss);
    return std::move(ss).str();
}

Trajectory deserialize_event_log(std::istream& in) {
    Trajectory t;
    bool have_header = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const bool last_line = in.peek() == std::char_traits<char>::eof();
        if (line.empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error&) {
            if (last_line) break;  // torn write at the tail
            throw ValidationError(fmt::format("event log line {} is not valid JSON", line_no));
        }
        const auto kind = record.value("record", std::string{});
        if (kind == "header") {
            if (have_header) throw ValidationError("event log has two header records");
            have_header = true;
            t.instance_id = record.at("instance_id").get<std::string>();
            t.attempt_index = record.at("attempt_index").get<int>();
            t.temperature = record.at("temperature").get<double>();
            t.workspace_root = record.value("workspace_root", std::string{});
        } else if (kind == "event") {
            if (!have_header) throw ValidationError("event record precedes the header");
            Event e;
            try {
                e = record.get<Event>();
            } catch (const json::exception& ex) {
                throw ValidationError(fmt::format("event log line {}: {}", line_no, ex.what()));
            }
            if (e.index != t.events.size()) {
                throw ValidationError(
                    fmt::format("event log line {}: index {} breaks contiguity (expected {})", line_no, e.index,
                                t.events.size()));
            }
            t.events.push_back(std::move(e));
        } else {
            throw ValidationError(fmt::format("event log line {}: unknown record type '{}'", line_no, kind));
        }
    }
    if (!have_header) throw ValidationError("event log has no header record");
    return t;
}

Trajectory deserialize_event_log(const std::string& text) {
    std::istringstream ss(text);
    return deserialize_event_log(ss);
}

Trajectory read_event_log(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InfraError(fmt::format("cannot open event log {}", path.string()));
    return deserialize_event_log(in);
}

EventLogWriter::EventLogWriter(const fs::path& path, const Trajectory& header) : path_(path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw InfraError(fmt::format("cannot open event log {} for writing", path.string()));
    write_line(header_record(header).dump());
}

void EventLogWriter::append(const Event& event) { write_line(event_record(event).dump()); }

void EventLogWriter::write_line(const std::string& line) {
    out_ << line << '\n';
    out_.flush();
    if (!out_) throw InfraError(fmt::format("write to event log {} failed", path_.string()));
}

}  // namespace harness
