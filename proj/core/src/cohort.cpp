#include <algorithm>
#include <map>
#include <sstream>

#include "utpada/error.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/store.hpp"

namespace utpada {
namespace {

using nlohmann::json;

bool bank_backed(const ContributionRecord& r, const SnippetResolver& resolves) {
  return std::any_of(r.snippet_ids_used.begin(), r.snippet_ids_used.end(), [&](const std::string& id) {
    return resolves ? resolves(id) : is_valid_snippet_id(id);
  });
}

std::optional<Rational> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

json rate_json(const std::optional<Rational>& r) { return r ? json(r->to_double()) : json(nullptr); }

std::string rate_text(const std::optional<Rational>& r) { return r ? r->to_decimal(4, 4) : "undefined"; }

// Contributions of one participant in submission order, with their bank
// reliance rate.
struct ParticipantHistory {
  std::vector<const ContributionRecord*> records;
  std::size_t backed = 0;
};

std::map<std::string, ParticipantHistory> by_participant(const MetricDb& db, const SnippetResolver& resolves) {
  std::map<std::string, ParticipantHistory> out;
  for (const auto& [id, r] : db.contributions()) {
    auto& h = out[r.participant_id];
    h.records.push_back(&r);
    if (bank_backed(r, resolves)) ++h.backed;
  }
  for (auto& [_, h] : out) {
    std::stable_sort(h.records.begin(), h.records.end(), [](const auto* a, const auto* b) {
      return std::tie(a->submitted_at, a->contribution_id) < std::tie(b->submitted_at, b->contribution_id);
    });
  }
  return out;
}

std::vector<RsiScore> scored_history(const MetricDb& db, const ParticipantHistory& h) {
  std::vector<RsiScore> scores;
  for (const auto* r : h.records) {
    if (auto it = db.scorecards().find(r->contribution_id); it != db.scorecards().end()) {
      scores.push_back(compute_rsi(it->second));
    }
  }
  return scores;
}

}  // namespace

CohortReport cohort_report(const MetricDb& db, const SnippetResolver& resolves) {
  CohortReport out;
  for (const auto& [id, r] : db.contributions()) {
    ++out.contributions;
    if (!bank_backed(r, resolves)) continue;
    ++out.bank_backed;
    auto card = db.scorecards().find(id);
    if (card != db.scorecards().end() && card->second.snippet_use == SnippetUse::AppropriateSnippet) {
      ++out.appropriate;
    }
  }
  out.reliance_rate = ratio(out.bank_backed, out.contributions);
  out.correct_snippet_rate = ratio(out.appropriate, out.bank_backed);

  for (const auto& [pid, h] : by_participant(db, resolves)) {
    auto scores = scored_history(db, h);
    if (scores.empty()) continue;
    auto summary = classify_participant(scores, ratio(h.backed, h.records.size()));
    summary.participant_id = pid;
    out.participants.push_back(std::move(summary));
  }

  std::map<std::pair<std::string, std::string>, QualityTrendRow> trend;
  for (const auto& e : db.events()) {
    if (e.type != EventType::ValidationSummary) continue;
    const auto org = e.data.at("org").get<std::string>();
    const auto period = e.data.at("generated_at").get<std::string>().substr(0, 7);
    auto& row = trend[{org, period}];
    row.org = org;
    row.period = period;
    ++row.runs;
    row.fatal += e.data.at("Incorrect").get<std::size_t>();
    row.trivial += e.data.at("Missing").get<std::size_t>();
  }
  for (auto& [_, row] : trend) out.quality_trend.push_back(std::move(row));
  return out;
}

ParticipantReport participant_report(const MetricDb& db, const std::string& participant_id,
                                     const SnippetResolver& resolves, std::optional<Date> sprint_start) {
  auto all = by_participant(db, resolves);
  auto it = all.find(participant_id);
  if (it == all.end()) {
    throw Error(ErrorKind::UnknownParticipant, "no contributions recorded for participant", participant_id);
  }
  const auto& h = it->second;

  ParticipantReport out;
  out.summary = classify_participant(scored_history(db, h), ratio(h.backed, h.records.size()));
  out.summary.participant_id = participant_id;

  Date start = sprint_start.value_or(Date::max());
  if (!sprint_start) {
    for (const auto* r : h.records) start = std::min(start, r->assigned_at.date());
  }
  const SprintCalendar calendar(start);
  std::map<int, std::pair<std::size_t, Rational>> buckets;
  for (const auto* r : h.records) {
    auto card = db.scorecards().find(r->contribution_id);
    if (card == db.scorecards().end()) continue;
    auto sprint = calendar.sprint_of(r->submitted_at.date());
    if (!sprint) continue;
    auto& [count, sum] = buckets[*sprint];
    ++count;
    sum += compute_rsi(card->second).value_10;
  }
  for (const auto& [sprint, bucket] : buckets) {
    out.series.push_back({sprint, calendar.first_day(sprint), calendar.last_day(sprint), bucket.first,
                          bucket.second / Rational(static_cast<std::int64_t>(bucket.first))});
  }
  return out;
}

ProductivityInputs productivity_inputs(const MetricDb& db, const std::string& contribution_id,
                                       const CodeQualityMetrics* quality, std::optional<Date> sprint_start) {
  auto it = db.contributions().find(contribution_id);
  if (it == db.contributions().end()) {
    throw Error(ErrorKind::DanglingReference, "unknown contribution", contribution_id);
  }
  const auto& target = it->second;
  std::vector<ContributionRecord> mine;
  for (const auto& [_, r] : db.contributions()) {
    if (r.participant_id == target.participant_id) mine.push_back(r);
  }
  Date start = sprint_start.value_or(Date::max());
  if (!sprint_start) {
    for (const auto& r : mine) start = std::min(start, r.assigned_at.date());
  }

  ProductivityInputs in;
  const auto sprint = SprintCalendar(start).sprint_of(target.submitted_at.date());
  if (sprint) {
    for (const auto& m : agile_metrics(mine, start).sprints) {
      if (m.sprint != *sprint) continue;
      in.deliverable_throughput = Rational(m.deliverable_throughput);
      in.lines_changed = Rational(m.lines_changed);
      in.lead_time_days = m.lead_time_days;
    }
  }
  if (quality) {
    bool measured = false;
    for (const auto& f : quality->files) measured = measured || f.structure.has_value();
    if (measured) in.nested_block_depth = Rational(quality->max_nested_block_depth);
    in.wacc = quality->wacc;
  }
  return in;
}

json to_json(const ParticipantSummary& s) {
  return json{{"participant_id", s.participant_id},
              {"scorecards", s.scorecard_count},
              {"mean_rsi", s.mean_rsi.to_double()},
              {"pass_rate", s.pass_rate.to_double()},
              {"bank_reliance_rate", rate_json(s.bank_reliance_rate)},
              {"classification", to_string(s.classification)},
              {"recommendation", s.recommendation}};
}

json to_json(const CohortReport& r) {
  json participants = json::array();
  for (const auto& p : r.participants) participants.push_back(to_json(p));
  json trend = json::array();
  for (const auto& t : r.quality_trend) {
    trend.push_back({{"org", t.org}, {"period", t.period}, {"runs", t.runs}, {"fatal", t.fatal},
                     {"trivial", t.trivial}});
  }
  return json{{"totals",
               {{"contributions", r.contributions}, {"bank_backed", r.bank_backed}, {"appropriate", r.appropriate}}},
              {"reliance_rate", rate_json(r.reliance_rate)},
              {"correct_snippet_rate", rate_json(r.correct_snippet_rate)},
              {"participants", participants},
              {"quality_trend", trend}};
}

json to_json(const ParticipantReport& r) {
  json series = json::array();
  for (const auto& s : r.series) {
    series.push_back({{"sprint", s.sprint},
                      {"first_day", format_date(s.first_day)},
                      {"last_day", format_date(s.last_day)},
                      {"scorecards", s.count},
                      {"mean_rsi", s.mean_rsi.to_double()}});
  }
  return json{{"summary", to_json(r.summary)}, {"series", series}};
}

std::string render_text(const CohortReport& r) {
  std::ostringstream os;
  os << "contributions     " << r.contributions << "\n"
     << "bank-backed       " << r.bank_backed << "\n"
     << "appropriate       " << r.appropriate << "\n"
     << "reliance rate     " << rate_text(r.reliance_rate) << "\n"
     << "correct snippets  " << rate_text(r.correct_snippet_rate) << "\n";
  if (!r.participants.empty()) {
    os << "\nparticipant\tcards\tmean\tpass\tclass\trecommendation\n";
    for (const auto& p : r.participants) {
      os << p.participant_id << "\t" << p.scorecard_count << "\t" << p.mean_rsi.round_half_up(1).to_decimal(1, 1)
         << "\t" << p.pass_rate.to_decimal(2, 2) << "\t" << to_string(p.classification) << "\t" << p.recommendation
         << "\n";
    }
  }
  if (!r.quality_trend.empty()) {
    os << "\norg\tperiod\truns\tfatal\ttrivial\n";
    for (const auto& t : r.quality_trend) {
      os << t.org << "\t" << t.period << "\t" << t.runs << "\t" << t.fatal << "\t" << t.trivial << "\n";
    }
  }
  return os.str();
}

std::string render_text(const ParticipantReport& r) {
  std::ostringstream os;
  const auto& s = r.summary;
  os << s.participant_id << ": " << to_string(s.classification) << " (" << s.recommendation << ")\n"
     << "scorecards " << s.scorecard_count << ", mean RSI " << s.mean_rsi.round_half_up(1).to_decimal(1, 1)
     << ", pass rate " << s.pass_rate.to_decimal(2, 2) << ", bank reliance " << rate_text(s.bank_reliance_rate)
     << "\n\nsprint\tfrom\tto\tcards\tmean RSI\n";
  for (const auto& p : r.series) {
    os << p.sprint << "\t" << format_date(p.first_day) << "\t" << format_date(p.last_day) << "\t" << p.count << "\t"
       << p.mean_rsi.round_half_up(1).to_decimal(1, 1) << "\n";
  }
  return os.str();
}

}  // namespace utpada
