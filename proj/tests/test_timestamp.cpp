#include "logknn/timestamp.hpp"

#include <ctime>

#include "doctest.h"
#include "logknn/error.hpp"
#include "logknn/event_log.hpp"
#include "logknn/synthgen.hpp"

using namespace logknn;

TEST_SUITE("timestamp") {

TEST_CASE("civil date arithmetic pins") {
  CHECK(days_from_civil(1970, 1, 1) == 0);
  CHECK(days_from_civil(1970, 1, 2) == 1);
  CHECK(days_from_civil(1969, 12, 31) == -1);
  CHECK(days_from_civil(2000, 3, 1) == 11017);
  CHECK(days_from_civil(2016, 1, 7) == 16807);

  std::int64_t y;
  unsigned m, d;
  civil_from_days(11017, y, m, d);
  CHECK(y == 2000);
  CHECK(m == 3);
  CHECK(d == 1);
}

TEST_CASE("civil round trip across leap boundaries") {
  for (std::int64_t days = -200000; days <= 200000; days += 37) {
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    CHECK(days_from_civil(y, m, d) == days);
    CHECK(m >= 1);
    CHECK(m <= 12);
    CHECK(d >= 1);
    CHECK(d <= 31);
  }
}

TEST_CASE("civil matches timegm for a sample of dates") {
  for (std::int64_t days = 0; days <= 40000; days += 311) {
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    std::tm tm{};
    tm.tm_year = static_cast<int>(y - 1900);
    tm.tm_mon = static_cast<int>(m - 1);
    tm.tm_mday = static_cast<int>(d);
    CHECK(timegm(&tm) == days * 86400);
  }
}

TEST_CASE("parse day-first date and time") {
  auto fmt = TimestampFormat::compile("%d/%m/%Y %H:%M:%S");
  auto t = fmt.parse("07/01/2016 08:17:17");
  REQUIRE(t.has_value());
  CHECK(*t == 16807 * 86400 + 8 * 3600 + 17 * 60 + 17);

  SUBCASE("unpadded digits accepted") {
    auto u = fmt.parse("7/1/2016 8:17:17");
    REQUIRE(u.has_value());
    CHECK(*u == *t);
  }
  SUBCASE("outer whitespace trimmed") {
    auto u = fmt.parse("  07/01/2016 08:17:17 ");
    REQUIRE(u.has_value());
    CHECK(*u == *t);
  }
  SUBCASE("trailing garbage rejected") {
    CHECK_FALSE(fmt.parse("07/01/2016 08:17:17x").has_value());
    CHECK_FALSE(fmt.parse("07/01/2016 08:17").has_value());
  }
  SUBCASE("wrong separators rejected") {
    CHECK_FALSE(fmt.parse("07-01-2016 08:17:17").has_value());
  }
}

TEST_CASE("minute-resolution pattern") {
  auto fmt = TimestampFormat::compile("%d-%m-%Y %H:%M");
  auto t = fmt.parse("1-3-2000 00:05");
  REQUIRE(t.has_value());
  CHECK(*t == 11017 * 86400 + 5 * 60);  // seconds default to zero
}

TEST_CASE("two-digit year maps to 2000s") {
  auto fmt = TimestampFormat::compile("%d/%m/%y %H:%M");
  auto t = fmt.parse("01/01/70 00:00");
  REQUIRE(t.has_value());
  std::int64_t y;
  unsigned m, d;
  civil_from_days(*t / 86400, y, m, d);
  CHECK(y == 2070);

  CHECK_FALSE(fmt.parse("01/01/1970 00:00").has_value());  // %y wants exactly two digits
}

TEST_CASE("four-digit year wants exactly four digits") {
  auto fmt = TimestampFormat::compile("%d/%m/%Y");
  CHECK(fmt.parse("01/01/2016").has_value());
  CHECK_FALSE(fmt.parse("01/01/16").has_value());
  CHECK_FALSE(fmt.parse("01/01/20165").has_value());
}

TEST_CASE("calendar validation") {
  auto fmt = TimestampFormat::compile("%d/%m/%Y %H:%M:%S");
  CHECK_FALSE(fmt.parse("31/04/2016 00:00:00").has_value());  // April has 30 days
  CHECK_FALSE(fmt.parse("32/01/2016 00:00:00").has_value());
  CHECK_FALSE(fmt.parse("01/13/2016 00:00:00").has_value());
  CHECK_FALSE(fmt.parse("00/01/2016 00:00:00").has_value());
  CHECK_FALSE(fmt.parse("01/00/2016 00:00:00").has_value());
  CHECK_FALSE(fmt.parse("01/01/2016 24:00:00").has_value());
  CHECK_FALSE(fmt.parse("01/01/2016 00:60:00").has_value());
  CHECK_FALSE(fmt.parse("01/01/2016 00:00:60").has_value());

  SUBCASE("leap years") {
    CHECK(fmt.parse("29/02/2016 00:00:00").has_value());
    CHECK(fmt.parse("29/02/2000 00:00:00").has_value());     // divisible by 400
    CHECK_FALSE(fmt.parse("29/02/2100 00:00:00").has_value());  // century, not by 400
    CHECK_FALSE(fmt.parse("29/02/2015 00:00:00").has_value());
    CHECK(fmt.parse("28/02/2015 00:00:00").has_value());
  }
}

TEST_CASE("literal percent") {
  auto fmt = TimestampFormat::compile("%d%%%m%%%Y");
  auto t = fmt.parse("01%02%2016");
  CHECK(t.has_value());
}

TEST_CASE("compile rejections") {
  CHECK_THROWS_AS(TimestampFormat::compile("%d%m/%Y"), Error);  // adjacent numeric fields
  CHECK_THROWS_AS(TimestampFormat::compile("%Y%y"), Error);
  CHECK_THROWS_AS(TimestampFormat::compile("%q"), Error);  // unknown field
  CHECK_THROWS_AS(TimestampFormat::compile("%d/%m/%"), Error);  // dangling percent
  CHECK_THROWS_AS(TimestampFormat::compile(""), Error);
  CHECK_NOTHROW(TimestampFormat::compile("%d %m"));  // separator in between is fine
}

TEST_CASE("format list picks first match") {
  auto formats = compile_formats(default_timestamp_formats());
  // Matches the seconds-resolution slash pattern.
  auto a = parse_timestamp("07/01/2016 08:17:17", formats);
  REQUIRE(a.has_value());
  // Falls through to the minute-resolution slash pattern.
  auto b = parse_timestamp("07/01/2016 08:17", formats);
  REQUIRE(b.has_value());
  CHECK(*a - *b == 17);
  // Dash variants.
  CHECK(parse_timestamp("07-01-2016 08:17:17", formats).has_value());
  CHECK(parse_timestamp("07-01-2016 08:17", formats).has_value());
  CHECK_FALSE(parse_timestamp("2016-01-07 08:17", formats).has_value());  // year-first not in defaults
  CHECK_FALSE(parse_timestamp("not a date", formats).has_value());
}

TEST_CASE("format_timestamp output") {
  CHECK(format_timestamp(0) == "01-01-1970 00:00:00");
  CHECK(format_timestamp(16807 * 86400 + 8 * 3600 + 17 * 60 + 17) == "07-01-2016 08:17:17");
}

TEST_CASE("format_timestamp round trips through the default formats") {
  auto formats = compile_formats(default_timestamp_formats());
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    // Stay within four-digit years.
    auto t = static_cast<EpochSeconds>(rng.uniform(4102444800ull));  // up to 2100-01-01
    auto parsed = parse_timestamp(format_timestamp(t), formats);
    REQUIRE(parsed.has_value());
    CHECK(*parsed == t);
  }
}

}  // TEST_SUITE
