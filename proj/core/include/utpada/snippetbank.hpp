#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "utpada/rational.hpp"

namespace utpada {

// `SNIP-` followed by exactly six decimal digits.
bool is_valid_snippet_id(std::string_view id);
std::string format_snippet_id(unsigned number);

enum class SnippetStatus { Candidate, Curated };
enum class ContributorRole { Developer, Ux, Qa, Reviewer };

std::string_view to_string(SnippetStatus s);
std::string_view to_string(ContributorRole r);
std::optional<ContributorRole> parse_contributor_role(std::string_view s);

struct SnippetDraft {
  std::string title;
  std::string language_tag;
  std::vector<std::string> keywords;
  std::vector<std::string> guideline_ids;
  std::string body;
  ContributorRole submitted_by_role = ContributorRole::Developer;
};

struct Snippet {
  std::string snippet_id;
  std::string title;
  std::string language_tag;
  std::vector<std::string> keywords;  // lowercase
  std::vector<std::string> guideline_ids;
  std::string body;  // verbatim
  SnippetStatus status = SnippetStatus::Candidate;
  ContributorRole submitted_by_role = ContributorRole::Developer;
  std::string created_at;

  friend bool operator==(const Snippet&, const Snippet&) = default;
};

struct SearchHit {
  std::string snippet_id;
  Rational score;
  std::vector<std::string> matched_keywords;

  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

inline constexpr int kKeywordMatchWeight = 3;
inline constexpr int kSubstringMatchWeight = 1;

// Code Snippet Bank. Backed by a directory holding one `SNIP-nnnnnn.snip`
// file per live snippet, a derived `index.tsv` keyword index and an
// append-only `archive.log` of rejected candidates. A bank opened without
// a directory lives only in memory.
//
// Mutations are serialized through an exclusive lock; searches and lookups
// take a shared lock, so a reader never observes a half-applied add.
class SnippetBank {
 public:
  SnippetBank();
  static SnippetBank open(const std::filesystem::path& dir);

  SnippetBank(SnippetBank&&) noexcept;
  SnippetBank& operator=(SnippetBank&&) noexcept;
  ~SnippetBank();

  // Errors: InvalidDraft, DuplicateBody (subject = existing id).
  Snippet add(const SnippetDraft& draft, std::string created_at = {});
  // Errors: NotFound, AlreadyCurated.
  Snippet curate(std::string_view snippet_id, bool approve, std::string decided_at = {});
  // Errors: EmptyQuery.
  std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;
  // Errors: NotFound (subject = id; message notes archived ids).
  Snippet lookup(std::string_view snippet_id) const;

  bool contains(std::string_view snippet_id) const;
  // Live and curated: the only snippets that may be recommended.
  bool is_recommendable(std::string_view snippet_id) const;
  bool is_archived(std::string_view snippet_id) const;

  std::vector<Snippet> snippets() const;
  std::size_t size() const;

  // Recomputes the keyword index from the snippet store (and rewrites
  // index.tsv when persistent). The index is a pure cache of the store.
  void rebuild_index();
  // Serialized keyword index as written to index.tsv.
  std::string index_tsv() const;

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  using Index = std::map<std::string, std::set<std::string>>;

  Index build_index_locked() const;
  void persist_snippet_locked(const Snippet& s) const;
  void persist_index_locked() const;
  std::vector<SearchHit> search_locked(std::string_view query, std::size_t limit) const;

  std::optional<std::filesystem::path> dir_;
  std::map<std::string, Snippet> snippets_;
  std::set<std::string> archived_;
  Index keyword_index_;  // curated keywords -> snippet ids
  std::map<std::string, std::string> search_text_;  // id -> lowercased title + body
  unsigned last_number_ = 0;
  std::unique_ptr<std::shared_mutex> mutex_;
};

// Snippet file text: header key/values, blank line, verbatim body.
std::string serialize_snippet(const Snippet& s);
Snippet parse_snippet(std::string_view contents, std::string_view origin = "<memory>");

// Lowercased query split on non-alphanumerics, first occurrence order, deduplicated.
std::vector<std::string> query_terms(std::string_view query);

}  // namespace utpada
