#pragma once

#include <filesystem>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "utpada/glob.hpp"
#include "utpada/tokenizer.hpp"

namespace utpada {

inline constexpr std::string_view kCaseFileExtension = ".vcase";

enum class PatternKind { TokenSeq, Regex, CssDecl };
enum class PatternRole { Required, Anti };

enum class CssPredicateKind { Equals, NotEquals, Present, Absent };

struct CssDeclPattern {
  std::string selector;  // normalized
  std::string property;  // lowercased
  CssPredicateKind predicate = CssPredicateKind::Present;
  std::string value;  // normalized; empty for Present/Absent

  friend bool operator==(const CssDeclPattern&, const CssDeclPattern&) = default;
};

// One detection pattern. Immutable once built; copies share the compiled regex.
class Pattern {
 public:
  static Pattern token_seq(std::string_view payload);
  static Pattern regex(std::string_view payload);
  static Pattern css_decl(std::string_view payload);
  // Builds from the kind keyword used in case files (tokenseq|regex|cssdecl).
  static Pattern from_case_file(std::string_view kind, std::string_view payload);

  PatternKind kind() const noexcept { return kind_; }
  // Payload in canonical case-file form.
  const std::string& payload() const noexcept { return payload_; }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::regex& compiled() const { return *regex_; }
  const CssDeclPattern& css() const noexcept { return css_; }

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.kind_ == b.kind_ && a.payload_ == b.payload_;
  }

 private:
  Pattern() = default;

  PatternKind kind_ = PatternKind::TokenSeq;
  std::string payload_;
  std::vector<std::string> tokens_;
  std::shared_ptr<const std::regex> regex_;
  CssDeclPattern css_;
};

std::string_view to_string(PatternKind kind);

struct ValidationCase {
  std::string case_id;
  std::string guideline_id;
  std::string description;
  std::vector<Glob> applies_to;
  std::vector<Pattern> required_patterns;
  std::vector<Pattern> anti_patterns;
  std::vector<std::string> remediation_snippet_ids;

  bool applies(std::string_view relative_path) const;

  friend bool operator==(const ValidationCase&, const ValidationCase&) = default;
};

// Throws Error{MalformedCase} with "<origin>:<line>: <field>: <reason>".
ValidationCase parse_case(std::string_view contents, std::string_view origin = "<memory>");
ValidationCase parse_case_file(const std::filesystem::path& path);

// Canonical text form; parse_case(serialize_case(c)) == c.
std::string serialize_case(const ValidationCase& c);

// Parses every `.vcase` file directly inside `dir`, fail-fast in path order,
// and returns the cases sorted by case_id.
std::vector<ValidationCase> load_case_set(const std::filesystem::path& dir);

// Adds `c` to a set, rejecting a case_id already present (DuplicateCaseId).
void insert_case(std::vector<ValidationCase>& set, ValidationCase c);

}  // namespace utpada
