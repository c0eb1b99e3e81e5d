#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "utpada/rational.hpp"

namespace utpada {

// The eight code-review proforma categories.
enum class ReviewCategory {
  Implementation,
  Dependencies,
  Security,
  LogicErrors,
  ErrorHandling,
  UsabilityAccessibility,
  Performance,
  Readability,
};

inline constexpr std::array kReviewCategories{
    ReviewCategory::Implementation, ReviewCategory::Dependencies,          ReviewCategory::Security,
    ReviewCategory::LogicErrors,    ReviewCategory::ErrorHandling,         ReviewCategory::UsabilityAccessibility,
    ReviewCategory::Performance,    ReviewCategory::Readability,
};

inline constexpr int kMaxCategoryScore = 5;

// Scorecard key suffix: implementation, logic_errors, usability_accessibility, ...
std::string_view category_key(ReviewCategory c);
std::optional<ReviewCategory> parse_category_key(std::string_view key);

enum class SnippetUse { AppropriateSnippet, InappropriateSnippet, NoSnippetUsed };
std::string_view to_string(SnippetUse u);  // appropriate | inappropriate | none
std::optional<SnippetUse> parse_snippet_use(std::string_view s);

inline const Rational kHalfScale{50};
inline const Rational kPassMark{13, 2};  // 6.5 on the 0-10 scale

struct Scorecard {
  std::string contribution_id;
  std::string reviewer_id;
  std::map<ReviewCategory, int> category_scores;
  // Reviewer-entered points; nullopt means computed from metrics ("auto").
  std::optional<Rational> productivity_points;
  SnippetUse snippet_use = SnippetUse::NoSnippetUsed;
  std::string notes;
};

// `.rsi` key/value text. Errors: MissingCategory, InvalidScorecard.
Scorecard parse_scorecard(std::string_view contents, std::string_view origin = "<memory>");
Scorecard load_scorecard(const std::filesystem::path& path);
std::string serialize_scorecard(const Scorecard& card);

struct RsiScore {
  Rational review_points;        // 0..50
  Rational productivity_points;  // 0..50
  Rational total_100;            // review + productivity
  Rational value_10;             // total_100 / 10, exact
  bool pass = false;             // value_10 >= 6.5

  // value_10 rounded half-up to one decimal, for display.
  Rational rounded() const { return value_10.round_half_up(1); }
};

// Equal-weight sum scaled onto 50 points: sum / 40 * 50. Errors: MissingCategory,
// InvalidScorecard for a score outside 0..5.
Rational review_points(const std::map<ReviewCategory, int>& category_scores);

// Errors: InvalidScorecard when points fall outside [0, 50]; the card's
// productivity must be resolved.
RsiScore compute_rsi(const Scorecard& card);
RsiScore compute_rsi(const Rational& review, const Rational& productivity);

// Targets for the five benchmarked productivity indicators.
struct ProductivityBenchmarks {
  Rational dt_per_sprint;           // throughput-type
  Rational lc_per_sprint;           // throughput-type
  Rational max_nested_block_depth;  // cost-type
  Rational max_wacc;                // cost-type
  Rational lead_time_days;          // cost-type
};

// `benchmarks.cfg`: `key = value` or `key: value` lines, `#` comments.
// Errors: MissingBenchmarks for an absent or non-positive target.
ProductivityBenchmarks parse_benchmarks(std::string_view contents);
ProductivityBenchmarks load_benchmarks(const std::filesystem::path& path);

// Observed indicator values; nullopt means no evidence for the window.
struct ProductivityInputs {
  std::optional<Rational> deliverable_throughput;
  std::optional<Rational> lines_changed;
  std::optional<Rational> nested_block_depth;
  std::optional<Rational> wacc;
  std::optional<Rational> lead_time_days;
};

// Indicator score = clamp(5 * ratio, 0, 10) with ratio actual/target for
// throughput and target/actual for cost; missing evidence (or a non-positive
// cost observation) scores 0. Points = sum of the five scores, in [0, 50].
Rational indicator_score(const std::optional<Rational>& actual, const Rational& target, bool cost_type);
Rational productivity_points(const ProductivityInputs& inputs, const ProductivityBenchmarks& bench);

enum class Classification { Exceptional, Moderate, Underperformer };
std::string_view to_string(Classification c);
std::string_view recommendation_for(Classification c);
// Exceptional > Moderate > Underperformer.
int rank(Classification c);

struct ClassificationThresholds {
  Rational exceptional_mean{17, 2};      // 8.5
  Rational exceptional_pass_rate{9, 10};  // 0.9
  Rational pass_mark = kPassMark;
};

struct ParticipantSummary {
  std::string participant_id;
  std::size_t scorecard_count = 0;
  Rational mean_rsi;
  Rational pass_rate;
  std::optional<Rational> bank_reliance_rate;
  Classification classification = Classification::Moderate;
  std::string recommendation;
};

// Errors: EmptyHistory.
ParticipantSummary classify_participant(std::span<const RsiScore> history, std::optional<Rational> reliance,
                                        const ClassificationThresholds& thresholds = {});

}  // namespace utpada
