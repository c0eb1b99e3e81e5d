#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utpada/css.hpp"
#include "utpada/tokenizer.hpp"
#include "utpada/valcase.hpp"

namespace utpada {

class SnippetBank;

struct LineSpan {
  std::uint32_t first = 0;  // 1-based, inclusive
  std::uint32_t last = 0;

  friend bool operator==(const LineSpan&, const LineSpan&) = default;
  friend auto operator<=>(const LineSpan&, const LineSpan&) = default;
};

struct SourceFile {
  std::string path;  // relative to the tree root, '/'-separated
  LanguageTag language = LanguageTag::Other;
  std::string raw;
  std::string stripped;            // comments blanked, newlines kept
  std::vector<std::string> lines;  // normalized, one per physical line
  std::vector<Token> tokens;
  std::vector<css::RuleBlock> css_rules;  // css files only

  // Builds the normalized views from raw text.
  static SourceFile from_text(std::string path, LanguageTag language, std::string raw);
};

struct Diagnostic {
  std::string path;
  std::string message;
  std::string case_id;  // empty for tree-level diagnostics

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct SourceTree {
  std::filesystem::path root;
  std::vector<SourceFile> files;  // sorted by path
  std::vector<Diagnostic> diagnostics;

  const SourceFile* find(std::string_view path) const;
};

struct SourceTreeOptions {
  std::uintmax_t max_file_bytes = 10u * 1024u * 1024u;
};

// Ingests every regular file with a recognized extension below `root`.
// Unreadable, binary, oversized or escaping files become diagnostics.
// Errors: IoError when root is not a directory, EmptyTree when nothing is ingested.
SourceTree load_source_tree(const std::filesystem::path& root, const SourceTreeOptions& options = {});

// Match locations for `pattern` in `file`, in document order. A CssDecl
// pattern against a non-css file yields no matches and, when `diagnostics`
// is given, a LanguageMismatch note.
std::vector<LineSpan> match_pattern(const Pattern& pattern, const SourceFile& file,
                                    std::vector<Diagnostic>* diagnostics = nullptr);

enum class FindingStatus { Correct, Incorrect, Missing, NotApplicable };
std::string_view to_string(FindingStatus s);

struct ValidationFinding {
  std::string case_id;
  std::string guideline_id;
  std::string path;
  FindingStatus status = FindingStatus::NotApplicable;
  std::optional<LineSpan> location;  // first decisive match
  std::vector<std::string> recommended_snippet_ids;

  friend bool operator==(const ValidationFinding&, const ValidationFinding&) = default;
};

struct CaseCounts {
  std::string case_id;
  std::string guideline_id;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::size_t missing = 0;
  std::size_t not_applicable = 0;

  std::size_t applicable() const { return correct + incorrect + missing; }
  friend bool operator==(const CaseCounts&, const CaseCounts&) = default;
};

struct ValidationReport {
  std::string run_id;
  std::string generated_at;
  std::size_t cases_run = 0;
  std::size_t files_scanned = 0;
  std::vector<ValidationFinding> findings;  // ordered by (case_id, path)
  std::vector<Diagnostic> diagnostics;

  // Derived from findings; there is no separately stored count state.
  std::vector<CaseCounts> counts() const;
  bool has_violations() const;
};

struct ValidationOptions {
  std::string timestamp;  // defaults to now
  unsigned threads = 1;
};

using SnippetFilter = std::function<bool(std::string_view snippet_id)>;

// Errors: EmptyCaseSet.
ValidationReport run_validation(const SourceTree& tree, const std::vector<ValidationCase>& cases,
                                const SnippetFilter& recommendable, const ValidationOptions& options = {});
ValidationReport run_validation(const SourceTree& tree, const std::vector<ValidationCase>& cases,
                                const SnippetBank& bank, const ValidationOptions& options = {});

// Status of one case against one file, following anti > required > missing.
ValidationFinding evaluate_case(const ValidationCase& c, const SourceFile& file,
                                const SnippetFilter& recommendable,
                                std::vector<Diagnostic>* diagnostics = nullptr);

}  // namespace utpada
