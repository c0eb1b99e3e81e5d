#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "utpada/analyzer.hpp"
#include "utpada/calendar.hpp"
#include "utpada/rational.hpp"

namespace utpada {

// ---------------------------------------------------------------------------
// Code quality metrics over brace-delimited sources (kotlin-like, js-like).
//
// Blocks are classified from the tokens of the statement that opens them:
//  * class blocks: the header mentions class/interface/object/struct/enum;
//  * function blocks: the header mentions fun/function, ends in `=>`, or is a
//    call-shaped signature `name(...)` not led by a control keyword;
//  * everything else is a plain block.
// A function body has depth 1 and each enclosed block adds one. Local
// functions start their own count.
// ---------------------------------------------------------------------------

inline constexpr std::string_view kTopLevelClass = "<toplevel>";

struct FunctionMetrics {
  std::string name;
  std::string class_name;  // qualified, or <toplevel>
  LineSpan span;           // opening to closing brace
  int max_depth = 1;
  int complexity = 1;  // 1 + decision points

  friend bool operator==(const FunctionMetrics&, const FunctionMetrics&) = default;
};

struct ClassRow {
  std::string name;
  int methods = 0;
  int wmc = 0;
  int loc = 0;  // non-blank lines of the class block (toplevel: of its functions)

  friend bool operator==(const ClassRow&, const ClassRow&) = default;
};

struct StructureMetrics {
  std::vector<FunctionMetrics> functions;  // in order of opening brace
  std::vector<ClassRow> classes;           // in order of opening brace, <toplevel> last
  int max_depth = 0;                       // 0 only when the file has no blocks
  std::vector<LineSpan> dead_code;
};

// One pass over the token stream. Errors: UnbalancedBraces (message names
// the line). Throws std::invalid_argument for non-brace languages.
StructureMetrics analyze_structure(const SourceFile& file);

struct NestingDepth {
  std::vector<FunctionMetrics> functions;
  int file_max = 0;
};

NestingDepth nested_block_depth(const SourceFile& file);
std::vector<ClassRow> wmc(const SourceFile& file);
// Statements following an unconditional return/throw/break/continue in the
// same block, one span per block.
std::vector<LineSpan> dead_code(const SourceFile& file);

// Sum(wmc * loc) / Sum(loc). Errors: NoClasses (no rows or zero total loc).
Rational wacc(std::span<const ClassRow> rows);

struct FileQuality {
  std::string path;
  int loc = 0;
  std::optional<StructureMetrics> structure;  // absent when unavailable
  std::string note;                           // why unavailable
};

struct CodeQualityMetrics {
  std::vector<FileQuality> files;
  std::optional<Rational> wacc;  // over every class row of every file
  int max_nested_block_depth = 0;
};

CodeQualityMetrics code_quality(const SourceTree& tree);

// ---------------------------------------------------------------------------
// Contribution records and agile metrics.
// ---------------------------------------------------------------------------

enum class ContributionStatus { Approved, Rework, Rejected };
std::string_view to_string(ContributionStatus s);
std::optional<ContributionStatus> parse_contribution_status(std::string_view s);

struct ContributionRecord {
  std::string contribution_id;
  std::string participant_id;
  std::string task_id;
  std::vector<std::string> snippet_ids_used;
  std::int64_t loc_added = 0;
  std::int64_t loc_updated = 0;
  std::int64_t loc_deleted = 0;
  std::int64_t commit_count = 0;
  Timestamp assigned_at;
  Timestamp started_at;
  Timestamp submitted_at;
  std::optional<Timestamp> approved_at;
  ContributionStatus status = ContributionStatus::Rework;

  std::int64_t lines_changed() const { return loc_added + loc_updated + loc_deleted; }
};

// Empty when the record is consistent, otherwise the violated rule.
std::string record_violation(const ContributionRecord& r);

inline constexpr std::string_view kCheckinHeader =
    "contribution_id\tparticipant_id\ttask_id\tsnippet_ids\tloc_added\tloc_updated\tloc_deleted\t"
    "commit_count\tassigned_at\tstarted_at\tsubmitted_at\tapproved_at\tstatus";

struct CheckinImport {
  std::vector<ContributionRecord> records;
  std::vector<std::string> diagnostics;  // one per skipped row
};

// Errors: InvalidRecord when the header row is not exactly kCheckinHeader.
// Bad rows are skipped and reported in diagnostics.
CheckinImport parse_checkins(std::string_view tsv);
std::string serialize_checkins(std::span<const ContributionRecord> records);

struct RecordTiming {
  std::string contribution_id;
  int lead_time_days = 0;   // working days assigned -> approved
  int cycle_time_days = 0;  // working days started -> approved
};

struct SprintMetrics {
  int sprint = 0;
  Date first_day;
  Date last_day;
  std::optional<Rational> lead_time_days;   // mean over approvals in the window
  std::optional<Rational> cycle_time_days;  // mean over approvals in the window
  int velocity = 0;                // distinct tasks approved in the window
  int deliverable_throughput = 0;  // approved contributions in the window
  std::int64_t lines_changed = 0;  // all records submitted in the window
};

struct AgileMetrics {
  std::string participant_id;
  std::vector<SprintMetrics> sprints;
  std::vector<RecordTiming> timings;  // approved records, input order
  std::vector<std::string> diagnostics;
};

// Errors: InvalidRecord when records mix participants. Records breaking the
// timestamp rules, or dated before the first sprint, are skipped with a
// diagnostic.
AgileMetrics agile_metrics(std::span<const ContributionRecord> records, Date sprint_start);

}  // namespace utpada
