#include "logknn/timestamp.hpp"

#include <array>
#include <cctype>

#include "logknn/error.hpp"

namespace logknn {

namespace {

bool is_leap(std::int64_t y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

unsigned days_in_month(std::int64_t y, unsigned m) {
  static constexpr std::array<unsigned, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                       31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool is_numeric_field(char f) { return f == 'd' || f == 'm' || f == 'H' || f == 'M' || f == 'S' || f == 'Y' || f == 'y'; }

}  // namespace

// Howard Hinnant's algorithm: days between 1970-01-01 and y-m-d.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& year, unsigned& month, unsigned& day) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  day = doy - (153 * mp + 2) / 5 + 1;
  month = mp + (mp < 10 ? 3 : -9);
  year = y + (month <= 2);
}

TimestampFormat TimestampFormat::compile(std::string_view pattern) {
  if (pattern.empty()) throw Error("config", "timestamp format is empty");
  TimestampFormat fmt;
  fmt.pattern_ = std::string(pattern);
  bool prev_numeric = false;
  for (size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c != '%') {
      fmt.tokens_.push_back({0, c});
      prev_numeric = false;
      continue;
    }
    if (i + 1 >= pattern.size())
      throw Error("config", "timestamp format ends with a bare '%': " + fmt.pattern_);
    char f = pattern[++i];
    if (f == '%') {
      fmt.tokens_.push_back({0, '%'});
      prev_numeric = false;
      continue;
    }
    if (!is_numeric_field(f))
      throw Error("config", std::string("unsupported timestamp field '%") + f + "' in " + fmt.pattern_);
    if (prev_numeric)
      throw Error("config", "adjacent numeric fields are ambiguous in timestamp format " + fmt.pattern_);
    fmt.tokens_.push_back({f, 0});
    prev_numeric = true;
  }
  return fmt;
}

std::optional<EpochSeconds> TimestampFormat::parse(std::string_view text) const {
  std::string_view s = trim(text);
  size_t pos = 0;
  // Field values left at their defaults when the pattern omits them.
  std::int64_t year = 1970;
  unsigned month = 1, day = 1, hour = 0, minute = 0, second = 0;

  for (const Token& tok : tokens_) {
    if (tok.field == 0) {
      if (pos >= s.size() || s[pos] != tok.literal) return std::nullopt;
      ++pos;
      continue;
    }
    // Greedy digit run; %Y needs exactly 4, %y exactly 2, the rest 1-2.
    size_t want_min = 1, want_max = 2;
    if (tok.field == 'Y') want_min = want_max = 4;
    if (tok.field == 'y') want_min = want_max = 2;
    size_t n = 0;
    unsigned value = 0;
    while (pos + n < s.size() && n < want_max && std::isdigit(static_cast<unsigned char>(s[pos + n]))) {
      value = value * 10 + static_cast<unsigned>(s[pos + n] - '0');
      ++n;
    }
    if (n < want_min) return std::nullopt;
    pos += n;
    switch (tok.field) {
      case 'd': day = value; break;
      case 'm': month = value; break;
      case 'H': hour = value; break;
      case 'M': minute = value; break;
      case 'S': second = value; break;
      case 'Y': year = value; break;
      case 'y': year = 2000 + value; break;
    }
  }
  if (pos != s.size()) return std::nullopt;

  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::vector<TimestampFormat> compile_formats(const std::vector<std::string>& patterns) {
  std::vector<TimestampFormat> out;
  out.reserve(patterns.size());
  for (const auto& p : patterns) out.push_back(TimestampFormat::compile(p));
  return out;
}

std::optional<EpochSeconds> parse_timestamp(std::string_view text,
                                            const std::vector<TimestampFormat>& formats) {
  for (const auto& f : formats) {
    if (auto t = f.parse(text)) return t;
  }
  return std::nullopt;
}

std::string format_timestamp(EpochSeconds t) {
  std::int64_t days = t / 86400;
  std::int64_t rem = t % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t year;
  unsigned month, day;
  civil_from_days(days, year, month, day);
  unsigned hour = static_cast<unsigned>(rem / 3600);
  unsigned minute = static_cast<unsigned>((rem % 3600) / 60);
  unsigned second = static_cast<unsigned>(rem % 60);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%02u-%02u-%04lld %02u:%02u:%02u", day, month,
                static_cast<long long>(year), hour, minute, second);
  return std::string(buf);
}

}  // namespace logknn
