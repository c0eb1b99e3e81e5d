#include <gtest/gtest.h>

#include <fstream>

#include "db_builders.hpp"
#include "test_support.hpp"
#include "utpada/error.hpp"
#include "utpada/store.hpp"
#include "utpada/text.hpp"

using namespace utpada;
using testing_support::TempDir;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no utpada::Error thrown";
  return ErrorKind::IoError;
}

void fill(MetricDb& db, int n) {
  for (int i = 0; i < n; ++i) {
    const auto id = "C-" + std::to_string(i);
    db.append(EventType::Contribution, to_json(testing_support::contribution(id, "dev-1", {"SNIP-000001"})),
              "2024-03-04T10:00:00Z");
  }
}

}  // namespace

TEST(MetricDb, SequenceNumbersStartAtOne) {
  auto db = MetricDb::in_memory();
  EXPECT_EQ(db.append(EventType::Contribution, to_json(testing_support::contribution("C1", "dev-1"))), 1u);
  EXPECT_EQ(db.append(EventType::Contribution, to_json(testing_support::contribution("C2", "dev-1"))), 2u);
  EXPECT_EQ(db.last_sequence(), 2u);
  EXPECT_EQ(db.contributions().size(), 2u);
}

TEST(MetricDb, ReferencesAndRecordsAreValidated) {
  auto db = MetricDb::in_memory();
  EXPECT_EQ(kind_of([&] { db.append(EventType::Scorecard, to_json(testing_support::scorecard("nope", 3, 20))); }),
            ErrorKind::DanglingReference);
  db.append(EventType::Contribution, to_json(testing_support::contribution("C1", "dev-1")));
  EXPECT_EQ(kind_of([&] { db.append(EventType::Contribution, to_json(testing_support::contribution("C1", "dev-1"))); }),
            ErrorKind::InvalidRecord);
  auto unresolved = testing_support::scorecard("C1", 3, 20);
  unresolved.productivity_points.reset();
  EXPECT_EQ(kind_of([&] { db.append(EventType::Scorecard, to_json(unresolved)); }), ErrorKind::InvalidScorecard);
  auto bad = testing_support::contribution("C2", "dev-1");
  bad.started_at = *parse_timestamp("2024-03-01");
  EXPECT_EQ(kind_of([&] { db.append(EventType::Contribution, to_json(bad)); }), ErrorKind::InvalidRecord);
  EXPECT_EQ(db.last_sequence(), 1u);
}

TEST(MetricDb, AppendAllIsAllOrNothing) {
  auto db = MetricDb::in_memory();
  std::vector<MetricDb::PendingEvent> batch;
  testing_support::push_reviewed(batch, testing_support::contribution("C1", "dev-1"),
                                 testing_support::scorecard("C1", 4, 30));
  batch.push_back({EventType::Scorecard, to_json(testing_support::scorecard("missing", 4, 30)), "t"});
  EXPECT_THROW(db.append_all(batch), Error);
  EXPECT_EQ(db.last_sequence(), 0u);
  batch.pop_back();
  EXPECT_EQ(db.append_all(batch), (std::vector<std::uint64_t>{1, 2, 3}));
}

TEST(MetricDb, CodecsRoundTrip) {
  auto r = testing_support::contribution("C9", "dev-3", {"SNIP-000001", "SNIP-000002"});
  r.status = ContributionStatus::Rework;
  r.approved_at.reset();
  const auto back = contribution_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  auto card = testing_support::scorecard("C9", 3, Rational(100, 3), SnippetUse::InappropriateSnippet);
  card.notes = "n";
  const auto c2 = scorecard_from_json(to_json(card));
  EXPECT_EQ(c2.productivity_points, card.productivity_points);
  EXPECT_EQ(c2.category_scores, card.category_scores);
  EXPECT_EQ(c2.snippet_use, card.snippet_use);
}

TEST(MetricDb, PersistsAndReplays) {
  TempDir dir;
  const auto path = dir / "metrics.db";
  {
    auto db = MetricDb::open(path);
    fill(db, 5);
  }
  auto db = MetricDb::open(path);
  EXPECT_EQ(db.last_sequence(), 5u);
  EXPECT_EQ(db.serialize(), text::read_file(path));
  const auto again = MetricDb::replay(db.serialize());
  EXPECT_EQ(again.events(), db.events());
  EXPECT_EQ(db.append(EventType::Curation, curation_event("SNIP-000001", "approve")), 6u);
}

TEST(MetricDb, TornTailIsDropped) {
  TempDir dir;
  const auto path = dir / "metrics.db";
  std::string full;
  {
    auto db = MetricDb::open(path);
    fill(db, 3);
    full = db.serialize();
  }
  std::filesystem::resize_file(path, full.size() - 7);
  {
    auto db = MetricDb::open(path, OpenMode::ReadOnly);
    EXPECT_EQ(db.last_sequence(), 2u);
    EXPECT_GT(db.dropped_tail_bytes(), 0u);
    EXPECT_EQ(std::filesystem::file_size(path), full.size() - 7);  // read-only never repairs
  }
  auto db = MetricDb::open(path);
  EXPECT_EQ(db.last_sequence(), 2u);
  EXPECT_EQ(db.append(EventType::Contribution, to_json(testing_support::contribution("C-x", "dev-1"))), 3u);
  auto reopened = MetricDb::open(path, OpenMode::ReadOnly);
  EXPECT_EQ(reopened.last_sequence(), 3u);
  EXPECT_EQ(reopened.dropped_tail_bytes(), 0u);
}

TEST(MetricDb, ChecksumMismatchIsCorrupt) {
  TempDir dir;
  const auto path = dir / "metrics.db";
  {
    auto db = MetricDb::open(path);
    fill(db, 3);
  }
  auto bytes = text::read_file(path);
  bytes[12] = static_cast<char>(bytes[12] ^ 0x20);
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
  }
  EXPECT_EQ(kind_of([&] { MetricDb::open(path, OpenMode::ReadOnly); }), ErrorKind::StoreCorrupt);
  EXPECT_EQ(kind_of([&] { MetricDb::replay(bytes); }), ErrorKind::StoreCorrupt);
}

TEST(MetricDb, SecondWriterIsLockedOut) {
  TempDir dir;
  const auto path = dir / "metrics.db";
  auto first = MetricDb::open(path);
  EXPECT_EQ(kind_of([&] { MetricDb::open(path); }), ErrorKind::StoreLocked);
  auto reader = MetricDb::open(path, OpenMode::ReadOnly);
  EXPECT_EQ(kind_of([&] { reader.append(EventType::Curation, curation_event("SNIP-000001", "approve")); }),
            ErrorKind::IoError);
  first = MetricDb::in_memory();  // releases the lock
  EXPECT_NO_THROW(MetricDb::open(path));
}

TEST(MetricDb, ReadOnlyOpenOfMissingFileIsEmpty) {
  TempDir dir;
  auto db = MetricDb::open(dir / "absent.db", OpenMode::ReadOnly);
  EXPECT_EQ(db.last_sequence(), 0u);
  EXPECT_FALSE(std::filesystem::exists(dir / "absent.db"));
}

TEST(MetricDb, MaskingRekeysIdentitiesOnly) {
  auto db = MetricDb::in_memory();
  std::vector<MetricDb::PendingEvent> batch;
  testing_support::push_reviewed(batch, testing_support::contribution("C1", "alice"),
                                 testing_support::scorecard("C1", 4, 30));
  testing_support::push_reviewed(batch, testing_support::contribution("C2", "bob"),
                                 testing_support::scorecard("C2", 4, 30));
  db.append_all(batch);
  const auto masked = mask_identities(db, "salt-1");
  ASSERT_EQ(masked.events().size(), db.events().size());
  for (std::size_t i = 0; i < db.events().size(); ++i) {
    EXPECT_EQ(masked.events()[i].seq, db.events()[i].seq);
    EXPECT_EQ(masked.events()[i].timestamp, db.events()[i].timestamp);
  }
  const auto dump = masked.serialize();
  EXPECT_EQ(dump.find("alice"), std::string::npos);
  EXPECT_EQ(dump.find("reviewer-1"), std::string::npos);
  EXPECT_EQ(masked.contributions().at("C1").participant_id, mask_token("P-", "alice", "salt-1"));
  EXPECT_NE(mask_token("P-", "alice", "salt-1"), mask_token("P-", "alice", "salt-2"));
  EXPECT_EQ(mask_token("P-", "alice", "s").size(), 14u);
  EXPECT_EQ(cohort_report(masked).contributions, 2u);
}

TEST(MetricDb, WriteCopyRefusesToOverwrite) {
  TempDir dir;
  auto db = MetricDb::in_memory();
  fill(db, 2);
  db.write_copy(dir / "copy.db");
  EXPECT_EQ(MetricDb::replay(text::read_file(dir / "copy.db")).events(), db.events());
  EXPECT_THROW(db.write_copy(dir / "copy.db"), Error);
}

TEST(Cohort, EmptyDbHasUndefinedRates) {
  const auto r = cohort_report(MetricDb::in_memory());
  EXPECT_EQ(r.contributions, 0u);
  EXPECT_FALSE(r.reliance_rate.has_value());
  EXPECT_FALSE(r.correct_snippet_rate.has_value());
  const auto j = to_json(r);
  EXPECT_TRUE(j["reliance_rate"].is_null());
  EXPECT_NE(render_text(r).find("undefined"), std::string::npos);
}

TEST(Cohort, AllBackedAndAppropriate) {
  auto db = MetricDb::in_memory();
  db.append_all(testing_support::cohort_events(10, 10, 10, 2));
  const auto r = cohort_report(db);
  EXPECT_EQ(r.reliance_rate, Rational(1));
  EXPECT_EQ(r.correct_snippet_rate, Rational(1));
  EXPECT_EQ(r.participants.size(), 2u);
}

TEST(Cohort, ResolverDecidesBankBacking) {
  auto db = MetricDb::in_memory();
  db.append_all(testing_support::cohort_events(10, 6, 3, 1));
  EXPECT_EQ(cohort_report(db).bank_backed, 6u);
  const auto only_first = cohort_report(db, [](std::string_view id) { return id == "SNIP-000001"; });
  EXPECT_EQ(only_first.bank_backed, 1u);
  EXPECT_EQ(only_first.appropriate, 1u);
}

TEST(Cohort, QualityTrendFromValidationSummaries) {
  auto db = MetricDb::in_memory();
  auto summary = [](std::string run, std::string at, int incorrect, int missing) {
    return nlohmann::json{{"run_id", run}, {"org", "org-a"}, {"generated_at", at}, {"Correct", 1},
                          {"Incorrect", incorrect}, {"Missing", missing}, {"NotApplicable", 0}};
  };
  db.append(EventType::ValidationSummary, summary("r1", "2024-03-04T10:00:00Z", 2, 1));
  db.append(EventType::ValidationSummary, summary("r2", "2024-03-20T10:00:00Z", 1, 0));
  db.append(EventType::ValidationSummary, summary("r3", "2024-04-02T10:00:00Z", 0, 0));
  const auto r = cohort_report(db);
  ASSERT_EQ(r.quality_trend.size(), 2u);
  EXPECT_EQ(r.quality_trend[0].period, "2024-03");
  EXPECT_EQ(r.quality_trend[0].runs, 2u);
  EXPECT_EQ(r.quality_trend[0].fatal, 3u);
  EXPECT_EQ(r.quality_trend[0].trivial, 1u);
  EXPECT_EQ(r.quality_trend[1].period, "2024-04");
}

TEST(Cohort, ParticipantSeriesBucketsBySprint) {
  auto db = MetricDb::in_memory();
  std::vector<MetricDb::PendingEvent> batch;
  // Mon 03-04 .. Mon 03-11 is sprint 0; Tue 03-12 .. 03-19 is sprint 1.
  const std::vector<std::string> days{"2024-03-04", "2024-03-06", "2024-03-11", "2024-03-12", "2024-03-19"};
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto id = "C" + std::to_string(i);
    testing_support::push_reviewed(batch, testing_support::contribution(id, "dev-1", {}, days[i]),
                                   testing_support::scorecard(id, 5, 40));
  }
  db.append_all(batch);
  const auto p = participant_report(db, "dev-1");
  ASSERT_EQ(p.series.size(), 2u);
  EXPECT_EQ(p.series[0].count, 3u);
  EXPECT_EQ(p.series[1].count, 2u);
  EXPECT_EQ(p.series[0].mean_rsi, Rational(9));
  EXPECT_EQ(p.summary.scorecard_count, 5u);
  EXPECT_EQ(p.summary.classification, Classification::Exceptional);
  EXPECT_EQ(kind_of([&] { participant_report(db, "nobody"); }), ErrorKind::UnknownParticipant);

  db.append(EventType::Contribution, to_json(testing_support::contribution("lonely", "dev-2")));
  EXPECT_EQ(kind_of([&] { participant_report(db, "dev-2"); }), ErrorKind::EmptyHistory);
  EXPECT_FALSE(render_text(p).empty());
}

TEST(Cohort, ProductivityInputsFromSprintWindow) {
  auto db = MetricDb::in_memory();
  db.append(EventType::Contribution, to_json(testing_support::contribution("C1", "dev-1", {}, "2024-03-04")));
  db.append(EventType::Contribution, to_json(testing_support::contribution("C2", "dev-1", {}, "2024-03-05")));
  const auto in = productivity_inputs(db, "C2");
  EXPECT_EQ(in.deliverable_throughput, Rational(2));
  EXPECT_EQ(in.lines_changed, Rational(30));
  EXPECT_EQ(in.lead_time_days, Rational(0));
  EXPECT_FALSE(in.nested_block_depth.has_value());
  EXPECT_FALSE(in.wacc.has_value());
  EXPECT_EQ(kind_of([&] { productivity_inputs(db, "C9"); }), ErrorKind::DanglingReference);
}

TEST(Cohort, OneSprintOfPassingScoresIsOneBucket) {
  auto db = MetricDb::in_memory();
  std::vector<MetricDb::PendingEvent> batch;
  for (int i = 0; i < 3; ++i) {
    const auto id = "S" + std::to_string(i);
    testing_support::push_reviewed(batch, testing_support::contribution(id, "dev-9", {}, "2024-03-0" + std::to_string(4 + i)),
                                   testing_support::scorecard(id, 4, 35));
  }
  db.append_all(batch);
  const auto p = participant_report(db, "dev-9");
  ASSERT_EQ(p.series.size(), 1u);
  EXPECT_EQ(p.series[0].count, 3u);
  EXPECT_EQ(p.summary.pass_rate, Rational(1));
}
