#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "logknn/timestamp.hpp"

namespace logknn {

struct EventRecord {
  std::string case_id;
  std::string activity;
  EpochSeconds timestamp = 0;
  std::string tiebreak;  // value of the tie-break column, empty when none configured
  // Residual columns in file order: (column name, value). Column name is the
  // header label when a header row exists, else the 0-based index as text.
  std::vector<std::pair<std::string, std::string>> attributes;
};

// Events sorted by (timestamp, tiebreak); full ties keep file order because
// the sort is stable over arrival order.
struct RawCase {
  std::string case_id;
  std::vector<EventRecord> events;
};

// Column specs are either a 0-based index ("2") or a header name
// ("DateStamp"); names require header=true.
struct IngestConfig {
  char delimiter = ';';
  bool header = false;
  std::string case_col = "0";
  std::string activity_col = "1";
  std::string timestamp_col = "2";
  std::string tiebreak_col;  // empty means no tie-break column
  std::vector<std::string> timestamp_formats;
  bool keep_attributes = true;

  IngestConfig();
};

// Day-first patterns, slash and dash, with and without seconds.
const std::vector<std::string>& default_timestamp_formats();

struct IngestSummary {
  std::size_t total_rows = 0;   // non-empty data rows seen (header excluded)
  std::size_t parsed_rows = 0;
  std::size_t skipped_rows = 0;
  std::map<std::string, std::size_t> skip_reasons;
  std::size_t case_count = 0;
  std::size_t event_count = 0;
};

// Cases appear in order of first appearance of their case_id.
struct EventLog {
  std::vector<RawCase> cases;
  IngestSummary summary;
};

EventLog parse_log(std::istream& in, const IngestConfig& config);
EventLog parse_log_file(const std::string& path, const IngestConfig& config);

// events-per-case -> number of cases with that many events
std::map<std::size_t, std::size_t> case_length_histogram(const std::vector<RawCase>& cases);

// Splits one record on the delimiter. A field wrapped in double quotes may
// contain the delimiter; "" inside a quoted field is a literal quote.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

// Replaces bytes that do not form valid UTF-8 with U+FFFD.
std::string sanitize_utf8(std::string_view in);

}  // namespace logknn
