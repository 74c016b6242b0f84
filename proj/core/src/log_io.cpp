#include "powl/log_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "escape.hpp"
#include "powl/error.hpp"

namespace powl2 {

using detail::escape_xml;

namespace pt = boost::property_tree;

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

struct RawEvent {
  std::optional<std::string> name;
  std::optional<std::string> lifecycle;
};

}  // namespace

EventLog parse_xes(std::istream& in, ActivityTable& activities) {
  pt::ptree doc;
  try {
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XES: " + e.message(), e.line());
  }
  auto root = doc.get_child_optional("log");
  if (!root) throw SchemaError("XES document has no <log> root element");

  std::vector<std::vector<RawEvent>> traces;
  bool has_lifecycle = false;
  std::size_t trace_index = 0;
  for (const auto& [tag, trace_node] : *root) {
    if (tag != "trace") continue;
    ++trace_index;
    auto& events = traces.emplace_back();
    std::size_t event_index = 0;
    for (const auto& [event_tag, event_node] : trace_node) {
      if (event_tag != "event") continue;
      ++event_index;
      RawEvent event;
      for (const auto& [attr_tag, attr_node] : event_node) {
        if (attr_tag == "<xmlattr>") continue;
        auto key = attr_node.get_optional<std::string>("<xmlattr>.key");
        auto value = attr_node.get_optional<std::string>("<xmlattr>.value");
        if (!key || !value) continue;
        if (*key == "concept:name") {
          event.name = *value;
        } else if (*key == "lifecycle:transition") {
          event.lifecycle = *value;
          has_lifecycle = true;
        }
      }
      if (!event.name) {
        throw SchemaError("event " + std::to_string(event_index) + " of trace " + std::to_string(trace_index) +
                          " has no concept:name attribute");
      }
      events.push_back(std::move(event));
    }
  }

  EventLog log;
  for (const auto& events : traces) {
    Trace trace;
    for (const auto& event : events) {
      if (has_lifecycle && event.lifecycle && !iequals(*event.lifecycle, "complete")) continue;
      trace.push_back(activities.intern(*event.name));
    }
    log.add(std::move(trace));
  }
  return log;
}

void write_xes(std::ostream& out, const EventLog& log, const ActivityTable& activities) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<log xes.version=\"1.0\" xes.features=\"\">\n";
  std::size_t case_no = 0;
  for (const auto& [trace, count] : log.variants()) {
    for (Count copy = 0; copy < count; ++copy) {
      out << "  <trace>\n";
      out << "    <string key=\"concept:name\" value=\"case_" << ++case_no << "\"/>\n";
      for (ActivityId a : trace) {
        out << "    <event>\n      <string key=\"concept:name\" value=\"";
        escape_xml(out, activities.label(a));
        out << "\"/>\n      <string key=\"lifecycle:transition\" value=\"complete\"/>\n    </event>\n";
      }
      out << "  </trace>\n";
    }
  }
  out << "</log>\n";
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

std::vector<CsvRecord> read_csv_records(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);

  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = 1;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) throw ParseError("stray quote inside unquoted CSV field", line);
        quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted CSV field", line);
  if (field_started || !field.empty() || !current.fields.empty()) end_record();
  return records;
}

void write_csv_field(std::ostream& out, std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
    out << value;
    return;
  }
  out << '"';
  for (char c : value) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

bool parse_fixed(std::string_view text, std::size_t pos, std::size_t len, int& value) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  return ec == std::errc{};
}

}  // namespace

bool parse_timestamp(std::string_view text, std::int64_t& micros) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return false;

  // Epoch seconds.
  {
    std::int64_t seconds = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seconds);
    if (ec == std::errc{} && ptr == text.data() + text.size()) {
      micros = seconds * 1'000'000;
      return true;
    }
  }

  // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
  int year, month, day, hour, minute, second;
  if (text.size() < 20) return false;
  if (!parse_fixed(text, 0, 4, year) || text[4] != '-' || !parse_fixed(text, 5, 2, month) || text[7] != '-' ||
      !parse_fixed(text, 8, 2, day))
    return false;
  if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return false;
  if (!parse_fixed(text, 11, 2, hour) || text[13] != ':' || !parse_fixed(text, 14, 2, minute) || text[16] != ':' ||
      !parse_fixed(text, 17, 2, second))
    return false;
  if (hour > 23 || minute > 59 || second > 60) return false;

  std::size_t pos = 19;
  std::int64_t frac_micros = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    std::int64_t scale = 100'000;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      if (digits < 6) {
        frac_micros += (text[pos] - '0') * scale;
        scale /= 10;
      }
      ++digits;
      ++pos;
    }
    if (digits == 0) return false;
  }
  if (pos >= text.size()) return false;
  std::int64_t offset_minutes = 0;
  if (text[pos] == 'Z' || text[pos] == 'z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    int oh, om;
    if (!parse_fixed(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !parse_fixed(text, pos + 4, 2, om))
      return false;
    offset_minutes = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
    pos += 6;
  } else {
    return false;
  }
  if (pos != text.size()) return false;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return false;
  std::int64_t days = sys_days{ymd}.time_since_epoch().count();
  std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_minutes * 60;
  micros = secs * 1'000'000 + frac_micros;
  return true;
}

EventLog parse_csv(std::istream& in, ActivityTable& activities, const CsvConfig& config) {
  auto records = read_csv_records(in);
  if (records.empty()) throw SchemaError("CSV input has no header row");

  const auto& header = records.front().fields;
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  auto case_col = column(config.case_column);
  auto activity_col = column(config.activity_column);
  if (!case_col) throw SchemaError("CSV header lacks case column '" + config.case_column + "'");
  if (!activity_col) throw SchemaError("CSV header lacks activity column '" + config.activity_column + "'");
  auto time_col = config.timestamp_column.empty() ? std::nullopt : column(config.timestamp_column);

  struct Row {
    std::int64_t time;
    ActivityId activity;
  };
  std::vector<std::vector<Row>> cases;
  std::unordered_map<std::string, std::size_t> case_index;

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::size_t needed = std::max(*case_col, *activity_col) + 1;
    if (time_col) needed = std::max(needed, *time_col + 1);
    if (rec.fields.size() < needed) {
      throw ParseError("CSV row " + std::to_string(r) + " has " + std::to_string(rec.fields.size()) +
                           " fields, expected at least " + std::to_string(needed),
                       rec.line);
    }
    std::int64_t time = 0;
    if (time_col && !parse_timestamp(rec.fields[*time_col], time)) {
      throw ParseError("CSV row " + std::to_string(r) + ": unparseable timestamp '" + rec.fields[*time_col] + "'",
                       rec.line);
    }
    auto [it, inserted] = case_index.try_emplace(rec.fields[*case_col], cases.size());
    if (inserted) cases.emplace_back();
    cases[it->second].push_back({time, activities.intern(rec.fields[*activity_col])});
  }

  EventLog log;
  for (auto& rows : cases) {
    if (time_col) {
      std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.time < b.time; });
    }
    Trace trace;
    trace.reserve(rows.size());
    for (const auto& row : rows) trace.push_back(row.activity);
    log.add(std::move(trace));
  }
  return log;
}

void write_csv(std::ostream& out, const EventLog& log, const ActivityTable& activities, const CsvConfig& config) {
  write_csv_field(out, config.case_column);
  out << ',';
  write_csv_field(out, config.activity_column);
  out << '\n';
  std::size_t case_no = 0;
  for (const auto& [trace, count] : log.variants()) {
    for (Count copy = 0; copy < count; ++copy) {
      std::string case_id = "case_" + std::to_string(++case_no);
      for (ActivityId a : trace) {
        write_csv_field(out, case_id);
        out << ',';
        write_csv_field(out, activities.label(a));
        out << '\n';
      }
    }
  }
}

LogFormat guess_log_format(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  return iequals(ext, ".csv") ? LogFormat::kCsv : LogFormat::kXes;
}

EventLog read_log_file(const std::filesystem::path& path, ActivityTable& activities, LogFormat format,
                       const CsvConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open log file '" + path.string() + "'");
  return format == LogFormat::kCsv ? parse_csv(in, activities, config) : parse_xes(in, activities);
}

}  // namespace powl2
