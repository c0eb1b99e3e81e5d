#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace utpada {

using Date = std::chrono::sys_days;

// ISO-8601 date (2024-03-04) or datetime (2024-03-04T09:30[:00][Z]).
struct Timestamp {
  std::chrono::sys_seconds instant;
  std::string text;  // as given

  Date date() const { return std::chrono::floor<std::chrono::days>(instant); }
  friend bool operator==(const Timestamp& a, const Timestamp& b) { return a.instant == b.instant; }
  friend auto operator<=>(const Timestamp& a, const Timestamp& b) { return a.instant <=> b.instant; }
};

std::optional<Timestamp> parse_timestamp(std::string_view text);
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

bool is_working_day(Date d);

// Number of Monday-Friday dates d with from < d <= to; negative when to < from.
int working_days_between(Date from, Date to);

inline constexpr int kWorkingDaysPerSprint = 6;

// Consecutive windows of `length` working days; the first window opens on
// the first working day on or after `start`. Weekend days belong to the
// window of the preceding working day.
class SprintCalendar {
 public:
  explicit SprintCalendar(Date start, int length = kWorkingDaysPerSprint);

  // nullopt for dates before the first working day.
  std::optional<int> sprint_of(Date d) const;
  Date first_day(int sprint) const;
  Date last_day(int sprint) const;
  Date start() const { return first_; }

 private:
  Date first_;
  int length_;
};

}  // namespace utpada
