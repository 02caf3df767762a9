#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logknn {

// Seconds since 1970-01-01 00:00:00. No timezone is applied anywhere; log
// timestamps are treated as naive wall-clock values.
using EpochSeconds = std::int64_t;

std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day);
void civil_from_days(std::int64_t days, std::int64_t& year, unsigned& month, unsigned& day);

// Compiled form of a pattern such as "%d/%m/%Y %H:%M".
//
// Fields: %d day, %m month, %H hour, %M minute, %S second (each matches one
// or two digits, so one pattern covers padded and unpadded input), %Y a
// four-digit year, %y a two-digit year mapped to 2000-2099, %% a literal
// percent. Any other character matches itself exactly. Two numeric fields
// may not be adjacent.
class TimestampFormat {
public:
  static TimestampFormat compile(std::string_view pattern);

  // Whole-string match after trimming outer whitespace; the date must be a
  // valid calendar date (leap years included).
  std::optional<EpochSeconds> parse(std::string_view text) const;

  const std::string& pattern() const noexcept { return pattern_; }

private:
  TimestampFormat() = default;

  struct Token {
    char field;    // 0 for a literal, else one of d m H M S Y y
    char literal;  // meaningful when field == 0
  };

  std::string pattern_;
  std::vector<Token> tokens_;
};

std::vector<TimestampFormat> compile_formats(const std::vector<std::string>& patterns);

// Tries the formats in order; the first one that matches wins.
std::optional<EpochSeconds> parse_timestamp(std::string_view text,
                                            const std::vector<TimestampFormat>& formats);

// "DD-MM-YYYY HH:MM:SS", parseable by the default ingest format list.
std::string format_timestamp(EpochSeconds t);

}  // namespace logknn
