#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "utpada/analyzer.hpp"
#include "utpada/calendar.hpp"
#include "utpada/metrics.hpp"
#include "utpada/rsi.hpp"

namespace utpada {

enum class EventType { ValidationSummary, Contribution, Scorecard, Rsi, Curation };
std::string_view to_string(EventType t);
std::optional<EventType> parse_event_type(std::string_view s);

struct Event {
  std::uint64_t seq = 0;
  std::string timestamp;
  EventType type = EventType::Contribution;
  nlohmann::json data;

  friend bool operator==(const Event&, const Event&) = default;
};

// Event payload codecs.
nlohmann::json to_json(const ContributionRecord& r);
ContributionRecord contribution_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Scorecard& card);
Scorecard scorecard_from_json(const nlohmann::json& j);
nlohmann::json rsi_event(const std::string& contribution_id, const RsiScore& score);
nlohmann::json validation_summary_event(const ValidationReport& report, const std::string& org);
nlohmann::json curation_event(const std::string& snippet_id, std::string_view action);

// Record framing: <u32 le length><u32 le crc32(payload)><payload json>.
std::string encode_record(std::string_view payload);

enum class OpenMode { ReadWrite, ReadOnly };

// The Metric DB: an append-only event log plus the aggregate state obtained
// by replaying it. A record whose frame is cut short at the end of the file is
// a torn write, dropped on open; a checksum mismatch anywhere is StoreCorrupt.
//
// A read-write handle holds an advisory lock on `<path>.lock` for its whole
// lifetime; read-only handles take no lock and never modify the file.
class MetricDb {
 public:
  static MetricDb in_memory();
  // Errors: StoreCorrupt, StoreLocked, IoError.
  static MetricDb open(const std::filesystem::path& path, OpenMode mode = OpenMode::ReadWrite);
  // Rebuilds an in-memory db from serialized log bytes (torn tail tolerated).
  static MetricDb replay(std::string_view log_bytes);

  MetricDb(MetricDb&&) noexcept;
  MetricDb& operator=(MetricDb&&) noexcept;
  ~MetricDb();

  // Errors: DanglingReference, InvalidRecord, InvalidScorecard, IoError.
  std::uint64_t append(EventType type, nlohmann::json data, std::string timestamp = {});

  struct PendingEvent {
    EventType type;
    nlohmann::json data;
    std::string timestamp;
  };
  // Validates every event first; appends all or none, with one sync.
  std::vector<std::uint64_t> append_all(std::vector<PendingEvent> events);

  const std::vector<Event>& events() const noexcept { return events_; }
  const std::map<std::string, ContributionRecord>& contributions() const noexcept { return contributions_; }
  // Latest scorecard per contribution.
  const std::map<std::string, Scorecard>& scorecards() const noexcept { return scorecards_; }
  std::uint64_t last_sequence() const noexcept { return events_.empty() ? 0 : events_.back().seq; }
  std::size_t dropped_tail_bytes() const noexcept { return dropped_tail_bytes_; }

  std::string serialize() const;
  // Writes the full log to a new file (fails if it exists).
  void write_copy(const std::filesystem::path& path) const;

 private:
  MetricDb() = default;

  struct Aggregate {
    std::map<std::string, ContributionRecord> contributions;
    std::map<std::string, Scorecard> scorecards;
  };
  void validate(const Event& e, const Aggregate& state) const;
  static void apply(const Event& e, Aggregate& state);
  void load_bytes(std::string_view bytes, bool tolerate_tail);
  void write_bytes(std::string_view bytes);
  void close_handles() noexcept;

  std::vector<Event> events_;
  std::map<std::string, ContributionRecord> contributions_;
  std::map<std::string, Scorecard> scorecards_;
  std::size_t dropped_tail_bytes_ = 0;
  std::optional<std::filesystem::path> path_;
  int fd_ = -1;
  int lock_fd_ = -1;
};

// Re-keys participant and reviewer ids with a salted hash, keeping sequence
// numbers, timestamps and contribution ids.
MetricDb mask_identities(const MetricDb& db, std::string_view salt);
std::string mask_token(std::string_view prefix, std::string_view id, std::string_view salt);

// ---------------------------------------------------------------------------
// Cohort and participant reports.
// ---------------------------------------------------------------------------

// Decides whether a snippet id resolves in the bank.
using SnippetResolver = std::function<bool(std::string_view)>;

struct QualityTrendRow {
  std::string org;
  std::string period;        // YYYY-MM of the validation run
  std::size_t runs = 0;
  std::size_t fatal = 0;     // Incorrect findings
  std::size_t trivial = 0;   // Missing findings
};

struct CohortReport {
  std::size_t contributions = 0;
  std::size_t bank_backed = 0;
  std::size_t appropriate = 0;
  std::optional<Rational> reliance_rate;         // bank_backed / contributions
  std::optional<Rational> correct_snippet_rate;  // appropriate / bank_backed
  std::vector<ParticipantSummary> participants;
  std::vector<QualityTrendRow> quality_trend;
};

// Without a resolver any well-formed snippet id counts as resolving.
CohortReport cohort_report(const MetricDb& db, const SnippetResolver& resolves = {});

struct SprintRsi {
  int sprint = 0;
  Date first_day;
  Date last_day;
  std::size_t count = 0;
  Rational mean_rsi;
};

struct ParticipantReport {
  ParticipantSummary summary;
  std::vector<SprintRsi> series;  // non-empty sprints only
};

// Scores are bucketed by the contribution's submission date into sprints
// starting at `sprint_start` (default: the participant's earliest assignment).
// Errors: UnknownParticipant, EmptyHistory.
ParticipantReport participant_report(const MetricDb& db, const std::string& participant_id,
                                     const SnippetResolver& resolves = {},
                                     std::optional<Date> sprint_start = std::nullopt);

// Indicator evidence for one contribution: DT, LC and lead time of the sprint
// holding its submission (sprints counted from `sprint_start`, default the
// participant's earliest assignment), depth and WACC from `quality` when given.
// Errors: DanglingReference.
ProductivityInputs productivity_inputs(const MetricDb& db, const std::string& contribution_id,
                                       const CodeQualityMetrics* quality = nullptr,
                                       std::optional<Date> sprint_start = std::nullopt);

nlohmann::json to_json(const ParticipantSummary& s);
nlohmann::json to_json(const CohortReport& r);
nlohmann::json to_json(const ParticipantReport& r);
std::string render_text(const CohortReport& r);
std::string render_text(const ParticipantReport& r);

}  // namespace utpada
