#include "logknn/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <unordered_map>

#include "logknn/error.hpp"

namespace logknn {

namespace {

std::string trim_copy(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

// Resolves a column spec to an index, or throws.
size_t resolve_column(const std::string& spec, const char* what,
                      const std::vector<std::string>& header_names, bool have_header) {
  if (all_digits(spec)) return static_cast<size_t>(std::stoull(spec));
  if (!have_header)
    throw Error("config", std::string(what) + " column '" + spec +
                              "' is a name but the log has no header row");
  for (size_t i = 0; i < header_names.size(); ++i)
    if (header_names[i] == spec) return i;
  throw Error("config", std::string(what) + " column '" + spec + "' not found in header");
}

}  // namespace

IngestConfig::IngestConfig() : timestamp_formats(default_timestamp_formats()) {}

const std::vector<std::string>& default_timestamp_formats() {
  static const std::vector<std::string> formats = {
      "%d/%m/%Y %H:%M:%S",
      "%d/%m/%Y %H:%M",
      "%d-%m-%Y %H:%M:%S",
      "%d-%m-%Y %H:%M",
  };
  return formats;
}

std::vector<std::string> split_delimited(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string cur;
  size_t i = 0;
  while (true) {
    if (i < line.size() && line[i] == '"') {
      ++i;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            i += 2;
          } else {
            ++i;
            break;
          }
        } else {
          cur += line[i++];
        }
      }
    }
    if (i >= line.size()) {
      fields.push_back(std::move(cur));
      break;
    }
    if (line[i] == delimiter) {
      fields.push_back(std::move(cur));
      cur.clear();
      ++i;
      continue;
    }
    cur += line[i++];
  }
  return fields;
}

std::string sanitize_utf8(std::string_view in) {
  static const char* replacement = "\xEF\xBF\xBD";
  std::string out;
  out.reserve(in.size());
  size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    size_t len;
    if (c < 0x80) len = 1;
    else if ((c & 0xE0) == 0xC0 && c >= 0xC2) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) len = 4;
    else {
      out += replacement;
      ++i;
      continue;
    }
    if (i + len > in.size()) {
      out += replacement;
      ++i;
      continue;
    }
    bool ok = true;
    for (size_t j = 1; j < len; ++j) {
      unsigned char cc = static_cast<unsigned char>(in[i + j]);
      if ((cc & 0xC0) != 0x80) ok = false;
    }
    // Reject overlong 3/4-byte forms and surrogates.
    if (ok && len == 3) {
      unsigned char c1 = static_cast<unsigned char>(in[i + 1]);
      if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 >= 0xA0)) ok = false;
    }
    if (ok && len == 4) {
      unsigned char c1 = static_cast<unsigned char>(in[i + 1]);
      if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 >= 0x90)) ok = false;
    }
    if (!ok) {
      out += replacement;
      ++i;
      continue;
    }
    out.append(in.substr(i, len));
    i += len;
  }
  return out;
}

EventLog parse_log(std::istream& in, const IngestConfig& config) {
  if (!in) throw Error("ingest", "input stream is not readable");

  auto formats = compile_formats(config.timestamp_formats);
  if (formats.empty()) throw Error("config", "no timestamp formats configured");

  EventLog log;
  std::unordered_map<std::string, size_t> case_index;

  std::vector<std::string> header_names;
  std::string line;
  bool first_line = true;
  bool have_columns = false;
  size_t ci = 0, ai = 0, ti = 0;
  size_t bi = std::string::npos;  // tie-break column, npos when unused
  bool want_tiebreak = !config.tiebreak_col.empty();

  auto resolve_all = [&]() {
    ci = resolve_column(config.case_col, "case-id", header_names, config.header);
    ai = resolve_column(config.activity_col, "activity", header_names, config.header);
    ti = resolve_column(config.timestamp_col, "timestamp", header_names, config.header);
    if (want_tiebreak)
      bi = resolve_column(config.tiebreak_col, "tie-break", header_names, config.header);
    have_columns = true;
  };
  if (!config.header) resolve_all();

  auto skip = [&](const char* reason) {
    ++log.summary.skipped_rows;
    ++log.summary.skip_reasons[reason];
  };

  while (std::getline(in, line)) {
    if (first_line) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      first_line = false;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string clean = sanitize_utf8(line);

    if (config.header && !have_columns) {
      header_names = split_delimited(clean, config.delimiter);
      for (auto& h : header_names) h = trim_copy(h);
      resolve_all();
      continue;
    }

    ++log.summary.total_rows;
    std::vector<std::string> fields = split_delimited(clean, config.delimiter);

    size_t needed = std::max({ci, ai, ti, want_tiebreak ? bi : size_t{0}});
    if (needed >= fields.size()) {
      skip("missing column");
      continue;
    }
    std::string case_id = trim_copy(fields[ci]);
    std::string activity = trim_copy(fields[ai]);
    if (case_id.empty()) {
      skip("empty case id");
      continue;
    }
    if (activity.empty()) {
      skip("empty activity");
      continue;
    }
    auto ts = parse_timestamp(fields[ti], formats);
    if (!ts) {
      skip("bad timestamp");
      continue;
    }

    EventRecord ev;
    ev.case_id = case_id;
    ev.activity = std::move(activity);
    ev.timestamp = *ts;
    if (want_tiebreak) ev.tiebreak = trim_copy(fields[bi]);
    if (config.keep_attributes) {
      for (size_t f = 0; f < fields.size(); ++f) {
        if (f == ci || f == ai || f == ti || (want_tiebreak && f == bi)) continue;
        std::string name = f < header_names.size() ? header_names[f] : std::to_string(f);
        ev.attributes.emplace_back(std::move(name), std::move(fields[f]));
      }
    }

    auto [it, inserted] = case_index.try_emplace(case_id, log.cases.size());
    if (inserted) {
      log.cases.push_back(RawCase{case_id, {}});
    }
    log.cases[it->second].events.push_back(std::move(ev));
    ++log.summary.parsed_rows;
  }
  if (in.bad()) throw Error("ingest", "read failure on input stream");
  if (log.summary.parsed_rows == 0) throw Error("ingest", "empty log: no rows could be parsed");

  for (auto& rc : log.cases) {
    std::stable_sort(rc.events.begin(), rc.events.end(),
                     [](const EventRecord& a, const EventRecord& b) {
                       if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                       return a.tiebreak < b.tiebreak;
                     });
  }
  log.summary.case_count = log.cases.size();
  log.summary.event_count = log.summary.parsed_rows;
  return log;
}

EventLog parse_log_file(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("ingest", "cannot open log file: " + path);
  return parse_log(in, config);
}

std::map<std::size_t, std::size_t> case_length_histogram(const std::vector<RawCase>& cases) {
  std::map<std::size_t, std::size_t> hist;
  for (const auto& rc : cases) ++hist[rc.events.size()];
  return hist;
}

}  // namespace logknn
