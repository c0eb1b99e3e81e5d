#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "utpada/error.hpp"
#include "utpada/metrics.hpp"
#include "utpada/text.hpp"

namespace utpada {
namespace {

std::optional<std::int64_t> parse_count(std::string_view s) {
  s = text::trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(ContributionStatus s) {
  switch (s) {
    case ContributionStatus::Approved: return "Approved";
    case ContributionStatus::Rework: return "Rework";
    case ContributionStatus::Rejected: return "Rejected";
  }
  return "Rework";
}

std::optional<ContributionStatus> parse_contribution_status(std::string_view s) {
  const auto lower = text::to_lower(text::trim(s));
  if (lower == "approved") return ContributionStatus::Approved;
  if (lower == "rework") return ContributionStatus::Rework;
  if (lower == "rejected") return ContributionStatus::Rejected;
  return std::nullopt;
}

std::string record_violation(const ContributionRecord& r) {
  if (r.contribution_id.empty()) return "contribution_id is empty";
  if (r.participant_id.empty()) return "participant_id is empty";
  if (r.loc_added < 0 || r.loc_updated < 0 || r.loc_deleted < 0 || r.commit_count < 0) {
    return "counts must be non-negative";
  }
  if (r.started_at < r.assigned_at) return "started_at precedes assigned_at";
  if (r.submitted_at < r.started_at) return "submitted_at precedes started_at";
  if (r.approved_at && *r.approved_at < r.submitted_at) return "approved_at precedes submitted_at";
  const bool approved = r.status == ContributionStatus::Approved;
  if (approved != r.approved_at.has_value()) return "status Approved requires approved_at and vice versa";
  return {};
}

CheckinImport parse_checkins(std::string_view tsv) {
  CheckinImport out;
  auto lines = text::split(tsv, '\n');
  std::size_t line_no = 0;
  bool header_seen = false;
  for (auto& line : lines) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::is_blank(line)) continue;
    if (!header_seen) {
      if (line != kCheckinHeader) {
        throw Error(ErrorKind::InvalidRecord, "line " + std::to_string(line_no) + ": header row must be exactly: " +
                                                  std::string(kCheckinHeader));
      }
      header_seen = true;
      continue;
    }
    auto skip = [&](const std::string& why) {
      out.diagnostics.push_back("line " + std::to_string(line_no) + ": " + why);
    };
    const auto cols = text::split(line, '\t');
    if (cols.size() != 13) {
      skip("expected 13 columns, found " + std::to_string(cols.size()));
      continue;
    }
    ContributionRecord r;
    r.contribution_id = std::string(text::trim(cols[0]));
    r.participant_id = std::string(text::trim(cols[1]));
    r.task_id = std::string(text::trim(cols[2]));
    if (text::trim(cols[3]) != "-") r.snippet_ids_used = text::split_list(cols[3]);

    auto added = parse_count(cols[4]), updated = parse_count(cols[5]), deleted = parse_count(cols[6]),
         commits = parse_count(cols[7]);
    if (!added || !updated || !deleted || !commits) {
      skip("loc and commit columns must be non-negative integers");
      continue;
    }
    r.loc_added = *added;
    r.loc_updated = *updated;
    r.loc_deleted = *deleted;
    r.commit_count = *commits;

    auto assigned = parse_timestamp(text::trim(cols[8])), started = parse_timestamp(text::trim(cols[9])),
         submitted = parse_timestamp(text::trim(cols[10]));
    if (!assigned || !started || !submitted) {
      skip("InvalidTimestamps: unparseable assigned/started/submitted timestamp");
      continue;
    }
    r.assigned_at = *assigned;
    r.started_at = *started;
    r.submitted_at = *submitted;
    const auto approved_text = text::trim(cols[11]);
    if (approved_text != "-") {
      auto approved = parse_timestamp(approved_text);
      if (!approved) {
        skip("InvalidTimestamps: unparseable approved_at");
        continue;
      }
      r.approved_at = *approved;
    }
    auto status = parse_contribution_status(cols[12]);
    if (!status) {
      skip("unknown status '" + std::string(text::trim(cols[12])) + "'");
      continue;
    }
    r.status = *status;
    if (auto why = record_violation(r); !why.empty()) {
      skip("InvalidTimestamps: " + why);
      continue;
    }
    out.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorKind::InvalidRecord, "check-in export is empty (no header row)");
  return out;
}

std::string serialize_checkins(std::span<const ContributionRecord> records) {
  std::string out(kCheckinHeader);
  out += "\n";
  for (const auto& r : records) {
    std::vector<std::string> cols{r.contribution_id,
                                  r.participant_id,
                                  r.task_id,
                                  r.snippet_ids_used.empty() ? "-" : text::join(r.snippet_ids_used, ","),
                                  std::to_string(r.loc_added),
                                  std::to_string(r.loc_updated),
                                  std::to_string(r.loc_deleted),
                                  std::to_string(r.commit_count),
                                  r.assigned_at.text,
                                  r.started_at.text,
                                  r.submitted_at.text,
                                  r.approved_at ? r.approved_at->text : "-",
                                  std::string(to_string(r.status))};
    out += text::join(cols, "\t") + "\n";
  }
  return out;
}

AgileMetrics agile_metrics(std::span<const ContributionRecord> records, Date sprint_start) {
  AgileMetrics out;
  const SprintCalendar calendar(sprint_start);

  struct Window {
    std::int64_t lines_changed = 0;
    int approved = 0;
    std::set<std::string> tasks;
    Rational lead_sum = 0;
    Rational cycle_sum = 0;
  };
  std::map<int, Window> windows;

  for (const auto& r : records) {
    if (out.participant_id.empty()) out.participant_id = r.participant_id;
    if (r.participant_id != out.participant_id) {
      throw Error(ErrorKind::InvalidRecord, "agile metrics need records of one participant; found '" +
                                                out.participant_id + "' and '" + r.participant_id + "'");
    }
    if (auto why = record_violation(r); !why.empty()) {
      out.diagnostics.push_back(r.contribution_id + ": InvalidTimestamps: " + why);
      continue;
    }
    const auto submitted_sprint = calendar.sprint_of(r.submitted_at.date());
    if (!submitted_sprint) {
      out.diagnostics.push_back(r.contribution_id + ": submitted before the first sprint");
      continue;
    }
    windows[*submitted_sprint].lines_changed += r.lines_changed();

    if (r.status != ContributionStatus::Approved) continue;
    const Date approved = r.approved_at->date();
    const auto approved_sprint = calendar.sprint_of(approved);
    RecordTiming timing{r.contribution_id, working_days_between(r.assigned_at.date(), approved),
                        working_days_between(r.started_at.date(), approved)};
    out.timings.push_back(timing);
    auto& w = windows[*approved_sprint];  // approved >= submitted, so inside the calendar
    ++w.approved;
    w.tasks.insert(r.task_id.empty() ? "\x1f" + r.contribution_id : r.task_id);
    w.lead_sum += Rational(timing.lead_time_days);
    w.cycle_sum += Rational(timing.cycle_time_days);
  }

  if (windows.empty()) return out;
  const int last = windows.rbegin()->first;
  for (int s = 0; s <= last; ++s) {
    SprintMetrics m;
    m.sprint = s;
    m.first_day = calendar.first_day(s);
    m.last_day = calendar.last_day(s);
    if (auto it = windows.find(s); it != windows.end()) {
      const Window& w = it->second;
      m.lines_changed = w.lines_changed;
      m.deliverable_throughput = w.approved;
      m.velocity = static_cast<int>(w.tasks.size());
      if (w.approved > 0) {
        m.lead_time_days = w.lead_sum / Rational(w.approved);
        m.cycle_time_days = w.cycle_sum / Rational(w.approved);
      }
    }
    out.sprints.push_back(m);
  }
  return out;
}

}  // namespace utpada
