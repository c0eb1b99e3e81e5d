#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "db_builders.hpp"
#include "property_common.hpp"
#include "utpada/error.hpp"
#include "utpada/store.hpp"

using namespace utpada;
using property::coin;
using property::kCases;
using property::pick;

namespace {

std::vector<MetricDb::PendingEvent> random_log(std::mt19937_64& g) {
  std::vector<MetricDb::PendingEvent> out;
  const int n = pick(g, 0, 12);
  for (int i = 0; i < n; ++i) {
    const auto id = "C" + std::to_string(i);
    std::vector<std::string> snippets;
    if (coin(g, 70)) snippets.push_back(format_snippet_id(static_cast<unsigned>(pick(g, 1, 5))));
    const auto r = testing_support::contribution(id, "dev-" + std::to_string(pick(g, 0, 2)), snippets);
    if (coin(g, 80)) {
      const auto use = static_cast<SnippetUse>(pick(g, 0, 2));
      testing_support::push_reviewed(out, r, testing_support::scorecard(id, pick(g, 0, 5), Rational(pick(g, 0, 50)), use));
    } else {
      out.push_back({EventType::Contribution, to_json(r), "2024-03-04T12:00:00Z"});
    }
    if (coin(g, 20)) out.push_back({EventType::Curation, curation_event("SNIP-000001", "approved"), "2024-03-04T13:00:00Z"});
  }
  return out;
}

}  // namespace

// cohort_report(db) == cohort_report(replay(serialize(db))).
TEST(StoreProperty, ReplayIsDeterministic) {
  auto g = testing_support::rng(401);
  for (int i = 0; i < kCases; ++i) {
    auto db = MetricDb::in_memory();
    db.append_all(random_log(g));
    const auto copy = MetricDb::replay(db.serialize());
    ASSERT_EQ(copy.events(), db.events());
    ASSERT_EQ(to_json(cohort_report(copy)), to_json(cohort_report(db)));
    ASSERT_EQ(copy.serialize(), db.serialize());

    const auto r = cohort_report(db);
    if (r.reliance_rate) {
      ASSERT_GE(*r.reliance_rate, Rational(0));
      ASSERT_LE(*r.reliance_rate, Rational(1));
      ASSERT_EQ(*r.reliance_rate, Rational(static_cast<std::int64_t>(r.bank_backed),
                                           static_cast<std::int64_t>(r.contributions)));
    } else {
      ASSERT_EQ(r.contributions, 0u);
    }
    if (r.correct_snippet_rate) {
      ASSERT_LE(*r.correct_snippet_rate, Rational(1));
    } else {
      ASSERT_EQ(r.bank_backed, 0u);
    }
  }
}

// Cutting the log anywhere inside its final record loses that record only.
TEST(StoreProperty, TruncatedTailRecovers) {
  auto g = testing_support::rng(402);
  int exercised = 0;
  while (exercised < kCases) {
    auto db = MetricDb::in_memory();
    db.append_all(random_log(g));
    if (db.events().empty()) continue;
    ++exercised;
    const auto bytes = db.serialize();
    auto without_last = MetricDb::in_memory();
    std::vector<MetricDb::PendingEvent> head;
    for (std::size_t k = 0; k + 1 < db.events().size(); ++k) {
      const auto& e = db.events()[k];
      head.push_back({e.type, e.data, e.timestamp});
    }
    without_last.append_all(head);
    const auto prefix = without_last.serialize().size();
    const auto cut = prefix + static_cast<std::size_t>(pick(g, 0, static_cast<int>(bytes.size() - prefix) - 1));
    const auto recovered = MetricDb::replay(std::string_view(bytes).substr(0, cut));
    ASSERT_EQ(recovered.events().size(), db.events().size() - 1);
    ASSERT_EQ(recovered.dropped_tail_bytes(), cut - prefix);
    ASSERT_EQ(recovered.serialize(), without_last.serialize());
  }
}

// A flipped payload byte is always detected, never silently replayed.
TEST(StoreProperty, BitFlipsAreDetected) {
  auto g = testing_support::rng(403);
  int exercised = 0;
  while (exercised < kCases) {
    auto db = MetricDb::in_memory();
    db.append_all(random_log(g));
    if (db.events().empty()) continue;
    ++exercised;
    auto bytes = db.serialize();
    // Skip the length prefix of the first record so framing stays intact.
    const auto pos = static_cast<std::size_t>(pick(g, 4, static_cast<int>(bytes.size()) - 1));
    bytes[pos] = static_cast<char>(bytes[pos] ^ (1 << pick(g, 0, 7)));
    bool detected = false;
    try {
      const auto back = MetricDb::replay(bytes);
      // A flip inside a later length prefix can shorten the frame into a torn tail;
      // the surviving events must still be an intact prefix of the original.
      ASSERT_LT(back.events().size(), db.events().size());
      for (std::size_t k = 0; k < back.events().size(); ++k) ASSERT_EQ(back.events()[k], db.events()[k]);
      detected = true;
    } catch (const Error& e) {
      ASSERT_EQ(e.kind(), ErrorKind::StoreCorrupt);
      detected = true;
    }
    ASSERT_TRUE(detected);
  }
}
