#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "powl/event_log.hpp"

namespace powl2 {

// Minimal XES reader: <log>/<trace>/<event> with string attributes
// concept:name and lifecycle:transition. If any event carries a lifecycle
// value, only "complete" events are kept (case-insensitive); events with no
// lifecycle attribute are kept.
EventLog parse_xes(std::istream& in, ActivityTable& activities);

// Writes every event with lifecycle "complete" and a concept:name per trace.
void write_xes(std::ostream& out, const EventLog& log, const ActivityTable& activities);

struct CsvConfig {
  std::string case_column = "case_id";
  std::string activity_column = "activity";
  // Optional: if the header lacks this column, events keep file order.
  std::string timestamp_column = "timestamp";
};

// Comma-separated, header row, RFC 4180 quoting. Timestamps are RFC 3339 or
// integer epoch seconds. Cases appear in order of first occurrence.
EventLog parse_csv(std::istream& in, ActivityTable& activities, const CsvConfig& config = {});

// Writes case_id,activity rows; events of a case in trace order. Empty traces
// have no rows and do not survive a CSV round trip.
void write_csv(std::ostream& out, const EventLog& log, const ActivityTable& activities, const CsvConfig& config = {});

// Parses an RFC 3339 date-time or an integer epoch-seconds value into
// microseconds since the epoch. Returns false on anything else.
bool parse_timestamp(std::string_view text, std::int64_t& micros);

enum class LogFormat { kXes, kCsv };

// Chooses by file extension (.csv → CSV, anything else XES).
LogFormat guess_log_format(const std::filesystem::path& path);

EventLog read_log_file(const std::filesystem::path& path, ActivityTable& activities, LogFormat format,
                       const CsvConfig& config = {});

}  // namespace powl2
