#include "utpada/calendar.hpp"

#include <cctype>
#include <cstdio>

namespace utpada {
namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  out = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    out = out * 10 + (s[i] - '0');
  }
  return true;
}

// Weekdays in [a, b) for a <= b.
long weekdays_in_half_open(Date a, Date b) {
  const long days = (b - a).count();
  const long full_weeks = days / 7;
  long count = full_weeks * 5;
  for (Date d = a + std::chrono::days{full_weeks * 7}; d < b; d += std::chrono::days{1}) {
    if (is_working_day(d)) ++count;
  }
  return count;
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
  int y = 0, m = 0, d = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_int(s, 0, 4, y) || !read_int(s, 5, 2, m) || !read_int(s, 8, 2, d)) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  if (s.size() != 10) return std::nullopt;
  return sys_days{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  if (s.size() < 10) return std::nullopt;
  auto date = parse_date(s.substr(0, 10));
  if (!date) return std::nullopt;
  int hh = 0, mm = 0, ss = 0;
  if (s.size() > 10) {
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    if (!read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !read_int(s, 14, 2, mm)) return std::nullopt;
    std::size_t pos = 16;
    if (pos < s.size() && s[pos] == ':') {
      if (!read_int(s, pos + 1, 2, ss)) return std::nullopt;
      pos += 3;
    }
    if (pos < s.size() && s[pos] == 'Z') ++pos;
    if (pos != s.size() || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
  }
  Timestamp t;
  t.instant = sys_seconds{*date} + hours{hh} + minutes{mm} + seconds{ss};
  t.text = std::string(s);
  return t;
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

bool is_working_day(Date d) {
  const weekday w{d};
  return w != Saturday && w != Sunday;
}

int working_days_between(Date from, Date to) {
  if (to < from) return -working_days_between(to, from);
  // (from, to] == [from + 1, to + 1)
  return static_cast<int>(weekdays_in_half_open(from + std::chrono::days{1}, to + std::chrono::days{1}));
}

SprintCalendar::SprintCalendar(Date start, int length) : first_(start), length_(length) {
  while (!is_working_day(first_)) first_ += std::chrono::days{1};
}

std::optional<int> SprintCalendar::sprint_of(Date d) const {
  if (d < first_) return std::nullopt;
  // Working days in [first_, d], minus one, gives the zero-based working-day index.
  const long index = weekdays_in_half_open(first_, d + std::chrono::days{1}) - 1;
  return static_cast<int>(index / length_);
}

Date SprintCalendar::first_day(int sprint) const {
  Date d = first_;
  long remaining = static_cast<long>(sprint) * length_;
  while (remaining > 0) {
    d += std::chrono::days{1};
    if (is_working_day(d)) --remaining;
  }
  return d;
}

Date SprintCalendar::last_day(int sprint) const {
  Date d = first_day(sprint);
  long remaining = length_ - 1;
  while (remaining > 0) {
    d += std::chrono::days{1};
    if (is_working_day(d)) --remaining;
  }
  return d;
}

}  // namespace utpada
