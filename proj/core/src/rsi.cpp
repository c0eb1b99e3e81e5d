#include "utpada/rsi.hpp"

#include "utpada/error.hpp"
#include "utpada/text.hpp"

namespace utpada {
namespace {

const Rational kZero{0};
const Rational kIndicatorScale{5};
const Rational kIndicatorMax{10};

[[noreturn]] void invalid(std::string_view origin, std::size_t line, const std::string& why) {
  std::string msg(origin);
  if (line) msg += ":" + std::to_string(line);
  throw Error(ErrorKind::InvalidScorecard, msg + ": " + why, std::string(origin));
}

// Splits `key: value` or `key = value`.
bool split_key_value(std::string_view line, std::string& key, std::string& value) {
  const auto sep = line.find_first_of(":=");
  if (sep == std::string_view::npos) return false;
  key = std::string(text::trim(line.substr(0, sep)));
  value = std::string(text::trim(line.substr(sep + 1)));
  return true;
}

// Decimal when that is exact, otherwise num/den.
std::string exact_text(const Rational& r) {
  auto decimal = r.to_decimal(12);
  if (Rational::try_parse(decimal) == r) return decimal;
  return std::to_string(r.num()) + "/" + std::to_string(r.den());
}

}  // namespace

std::string_view category_key(ReviewCategory c) {
  switch (c) {
    case ReviewCategory::Implementation: return "implementation";
    case ReviewCategory::Dependencies: return "dependencies";
    case ReviewCategory::Security: return "security";
    case ReviewCategory::LogicErrors: return "logic_errors";
    case ReviewCategory::ErrorHandling: return "error_handling";
    case ReviewCategory::UsabilityAccessibility: return "usability_accessibility";
    case ReviewCategory::Performance: return "performance";
    case ReviewCategory::Readability: return "readability";
  }
  return "implementation";
}

std::optional<ReviewCategory> parse_category_key(std::string_view key) {
  for (auto c : kReviewCategories) {
    if (category_key(c) == key) return c;
  }
  return std::nullopt;
}

std::string_view to_string(SnippetUse u) {
  switch (u) {
    case SnippetUse::AppropriateSnippet: return "appropriate";
    case SnippetUse::InappropriateSnippet: return "inappropriate";
    case SnippetUse::NoSnippetUsed: return "none";
  }
  return "none";
}

std::optional<SnippetUse> parse_snippet_use(std::string_view s) {
  if (s == "appropriate") return SnippetUse::AppropriateSnippet;
  if (s == "inappropriate") return SnippetUse::InappropriateSnippet;
  if (s == "none") return SnippetUse::NoSnippetUsed;
  return std::nullopt;
}

Scorecard parse_scorecard(std::string_view contents, std::string_view origin) {
  Scorecard card;
  bool has_contribution = false, has_reviewer = false, has_productivity = false, has_use = false;
  std::size_t line_no = 0;
  for (auto line : text::split(contents, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) invalid(origin, line_no, "expected '<key>: <value>'");
    const std::string key(text::trim(std::string_view(line).substr(0, colon)));
    const std::string value(text::trim(std::string_view(line).substr(colon + 1)));

    if (key == "contribution") {
      card.contribution_id = value;
      has_contribution = !value.empty();
    } else if (key == "reviewer") {
      card.reviewer_id = value;
      has_reviewer = !value.empty();
    } else if (text::starts_with(key, "score.")) {
      auto cat = parse_category_key(std::string_view(key).substr(6));
      if (!cat) invalid(origin, line_no, "unknown category '" + key.substr(6) + "'");
      auto v = Rational::try_parse(value);
      if (!v || v->den() != 1 || v->num() < 0 || v->num() > kMaxCategoryScore) {
        invalid(origin, line_no, key + " must be an integer 0..5");
      }
      if (card.category_scores.count(*cat)) invalid(origin, line_no, key + " repeated");
      card.category_scores[*cat] = static_cast<int>(v->num());
    } else if (key == "productivity") {
      has_productivity = true;
      if (value == "auto") {
        card.productivity_points.reset();
      } else {
        auto v = Rational::try_parse(value);
        if (!v || *v < kZero || kHalfScale < *v) invalid(origin, line_no, "productivity must be 0..50 or 'auto'");
        card.productivity_points = *v;
      }
    } else if (key == "snippet_use") {
      auto u = parse_snippet_use(value);
      if (!u) invalid(origin, line_no, "snippet_use must be appropriate, inappropriate or none");
      card.snippet_use = *u;
      has_use = true;
    } else if (key == "notes") {
      card.notes = value;
    } else {
      invalid(origin, line_no, "unknown field '" + key + "'");
    }
  }
  if (!has_contribution) invalid(origin, 0, "missing 'contribution:'");
  if (!has_reviewer) invalid(origin, 0, "missing 'reviewer:'");
  if (!has_productivity) invalid(origin, 0, "missing 'productivity:'");
  if (!has_use) invalid(origin, 0, "missing 'snippet_use:'");
  for (auto c : kReviewCategories) {
    if (!card.category_scores.count(c)) {
      throw Error(ErrorKind::MissingCategory,
                  std::string(origin) + ": missing score." + std::string(category_key(c)), std::string(origin));
    }
  }
  return card;
}

Scorecard load_scorecard(const std::filesystem::path& path) {
  return parse_scorecard(text::read_file(path), path.string());
}

std::string serialize_scorecard(const Scorecard& card) {
  std::string out = "contribution: " + card.contribution_id + "\nreviewer: " + card.reviewer_id + "\n";
  for (const auto& [cat, score] : card.category_scores) {
    out += "score." + std::string(category_key(cat)) + ": " + std::to_string(score) + "\n";
  }
  out += "productivity: " + (card.productivity_points ? exact_text(*card.productivity_points) : std::string("auto")) + "\n";
  out += "snippet_use: " + std::string(to_string(card.snippet_use)) + "\n";
  if (!card.notes.empty()) out += "notes: " + card.notes + "\n";
  return out;
}

Rational review_points(const std::map<ReviewCategory, int>& scores) {
  std::int64_t sum = 0;
  for (auto c : kReviewCategories) {
    auto it = scores.find(c);
    if (it == scores.end()) {
      throw Error(ErrorKind::MissingCategory, "missing score for " + std::string(category_key(c)));
    }
    if (it->second < 0 || it->second > kMaxCategoryScore) {
      throw Error(ErrorKind::InvalidScorecard, std::string(category_key(c)) + " score outside 0..5");
    }
    sum += it->second;
  }
  const Rational max_sum(static_cast<std::int64_t>(kReviewCategories.size()) * kMaxCategoryScore);
  return Rational(sum) / max_sum * kHalfScale;
}

RsiScore compute_rsi(const Rational& review, const Rational& productivity) {
  if (review < kZero || kHalfScale < review) throw Error(ErrorKind::InvalidScorecard, "review points outside 0..50");
  if (productivity < kZero || kHalfScale < productivity) {
    throw Error(ErrorKind::InvalidScorecard, "productivity points outside 0..50");
  }
  RsiScore s;
  s.review_points = review;
  s.productivity_points = productivity;
  s.total_100 = review + productivity;
  s.value_10 = s.total_100 / Rational(10);
  s.pass = !(s.value_10 < kPassMark);
  return s;
}

RsiScore compute_rsi(const Scorecard& card) {
  if (!card.productivity_points) {
    throw Error(ErrorKind::InvalidScorecard, "productivity points are 'auto' and have not been computed",
                card.contribution_id);
  }
  return compute_rsi(review_points(card.category_scores), *card.productivity_points);
}

ProductivityBenchmarks parse_benchmarks(std::string_view contents) {
  std::map<std::string, Rational> values;
  for (auto line : text::split(contents, '\n')) {
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string key, value;
    if (!split_key_value(t, key, value)) throw Error(ErrorKind::MissingBenchmarks, "bad line '" + std::string(t) + "'");
    auto v = Rational::try_parse(value);
    if (!v) throw Error(ErrorKind::MissingBenchmarks, key + " is not a number");
    values[key] = *v;
  }
  auto take = [&](const char* key) {
    auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorKind::MissingBenchmarks, std::string("missing target '") + key + "'");
    if (!(kZero < it->second)) throw Error(ErrorKind::MissingBenchmarks, std::string(key) + " must be > 0");
    return it->second;
  };
  ProductivityBenchmarks b;
  b.dt_per_sprint = take("dt_per_sprint");
  b.lc_per_sprint = take("lc_per_sprint");
  b.max_nested_block_depth = take("max_nested_block_depth");
  b.max_wacc = take("max_wacc");
  b.lead_time_days = take("lead_time_days");
  return b;
}

ProductivityBenchmarks load_benchmarks(const std::filesystem::path& path) {
  return parse_benchmarks(text::read_file(path));
}

Rational indicator_score(const std::optional<Rational>& actual, const Rational& target, bool cost_type) {
  if (!actual || !(kZero < target)) return kZero;
  Rational ratio;
  if (cost_type) {
    if (!(kZero < *actual)) return kZero;
    ratio = target / *actual;
  } else {
    if (*actual < kZero) return kZero;
    ratio = *actual / target;
  }
  return clamp(kIndicatorScale * ratio, kZero, kIndicatorMax);
}

Rational productivity_points(const ProductivityInputs& in, const ProductivityBenchmarks& b) {
  const Rational sum = indicator_score(in.deliverable_throughput, b.dt_per_sprint, false) +
                       indicator_score(in.lines_changed, b.lc_per_sprint, false) +
                       indicator_score(in.nested_block_depth, b.max_nested_block_depth, true) +
                       indicator_score(in.wacc, b.max_wacc, true) +
                       indicator_score(in.lead_time_days, b.lead_time_days, true);
  // Mean indicator score (0..10) times 5.
  return clamp(sum / Rational(5) * kIndicatorScale, kZero, kHalfScale);
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Exceptional: return "Exceptional";
    case Classification::Moderate: return "Moderate";
    case Classification::Underperformer: return "Underperformer";
  }
  return "Moderate";
}

std::string_view recommendation_for(Classification c) {
  switch (c) {
    case Classification::Exceptional: return "recommend early production transition (ref: 14-week average)";
    case Classification::Moderate: return "continue probation (ref: 18–24 weeks)";
    case Classification::Underperformer: return "review for non-development role or exit";
  }
  return "";
}

int rank(Classification c) {
  switch (c) {
    case Classification::Exceptional: return 2;
    case Classification::Moderate: return 1;
    case Classification::Underperformer: return 0;
  }
  return 0;
}

ParticipantSummary classify_participant(std::span<const RsiScore> history, std::optional<Rational> reliance,
                                        const ClassificationThresholds& t) {
  if (history.empty()) throw Error(ErrorKind::EmptyHistory, "participant has no RSI scores");
  Rational sum = 0;
  std::int64_t passes = 0;
  for (const auto& s : history) {
    sum += s.value_10;
    if (!(s.value_10 < t.pass_mark)) ++passes;
  }
  const Rational n(static_cast<std::int64_t>(history.size()));
  ParticipantSummary out;
  out.scorecard_count = history.size();
  out.mean_rsi = sum / n;
  out.pass_rate = Rational(passes) / n;
  out.bank_reliance_rate = reliance;
  if (!(out.mean_rsi < t.exceptional_mean) && !(out.pass_rate < t.exceptional_pass_rate)) {
    out.classification = Classification::Exceptional;
  } else if (out.mean_rsi < t.pass_mark) {
    out.classification = Classification::Underperformer;
  } else {
    out.classification = Classification::Moderate;
  }
  out.recommendation = std::string(recommendation_for(out.classification));
  return out;
}

}  // namespace utpada
