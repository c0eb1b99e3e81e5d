#include "utpada/snippetbank.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "utpada/error.hpp"
#include "utpada/text.hpp"
#include "utpada/tokenizer.hpp"

namespace utpada {
namespace {

constexpr std::string_view kSnippetExtension = ".snip";
constexpr std::string_view kIndexFile = "index.tsv";
constexpr std::string_view kArchiveFile = "archive.log";
constexpr unsigned kMaxSnippetNumber = 999999;

unsigned snippet_number(std::string_view id) {
  return static_cast<unsigned>(std::stoul(std::string(id.substr(5))));
}

std::optional<SnippetStatus> parse_status(std::string_view s) {
  if (s == "candidate") return SnippetStatus::Candidate;
  if (s == "curated") return SnippetStatus::Curated;
  return std::nullopt;
}

std::vector<std::string> normalized_keywords(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& k : raw) {
    auto t = text::to_lower(text::trim(k));
    if (t.empty()) throw Error(ErrorKind::InvalidDraft, "keywords must be non-empty strings");
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

bool is_valid_snippet_id(std::string_view id) {
  if (id.size() != 11 || id.substr(0, 5) != "SNIP-") return false;
  return std::all_of(id.begin() + 5, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::string format_snippet_id(unsigned number) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "SNIP-%06u", number);
  return buf;
}

std::string_view to_string(SnippetStatus s) {
  return s == SnippetStatus::Curated ? "curated" : "candidate";
}

std::string_view to_string(ContributorRole r) {
  switch (r) {
    case ContributorRole::Developer: return "developer";
    case ContributorRole::Ux: return "ux";
    case ContributorRole::Qa: return "qa";
    case ContributorRole::Reviewer: return "reviewer";
  }
  return "developer";
}

std::optional<ContributorRole> parse_contributor_role(std::string_view s) {
  for (auto r : {ContributorRole::Developer, ContributorRole::Ux, ContributorRole::Qa, ContributorRole::Reviewer}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::vector<std::string> query_terms(std::string_view query) {
  std::vector<std::string> terms;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && std::find(terms.begin(), terms.end(), current) == terms.end()) {
      terms.push_back(current);
    }
    current.clear();
  };
  for (char c : query) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return terms;
}

std::string serialize_snippet(const Snippet& s) {
  std::string out;
  out += "id: " + s.snippet_id + "\n";
  out += "title: " + s.title + "\n";
  out += "language: " + s.language_tag + "\n";
  out += "keywords: " + text::join(s.keywords, ",") + "\n";
  out += "guidelines: " + text::join(s.guideline_ids, ",") + "\n";
  out += "status: " + std::string(to_string(s.status)) + "\n";
  out += "role: " + std::string(to_string(s.submitted_by_role)) + "\n";
  out += "created_at: " + s.created_at + "\n";
  out += "\n";
  out += s.body;
  return out;
}

Snippet parse_snippet(std::string_view contents, std::string_view origin) {
  auto bad = [&](const std::string& why) -> Error {
    return Error(ErrorKind::IoError, std::string(origin) + ": " + why, std::string(origin));
  };
  const auto split_at = contents.find("\n\n");
  if (split_at == std::string_view::npos) throw bad("missing blank line between header and body");
  Snippet s;
  s.body = std::string(contents.substr(split_at + 2));
  bool has_id = false;
  for (const auto& line : text::split(contents.substr(0, split_at), '\n')) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw bad("header line without ':'");
    const std::string key(text::trim(std::string_view(line).substr(0, colon)));
    const std::string value(text::trim(std::string_view(line).substr(colon + 1)));
    if (key == "id") {
      s.snippet_id = value;
      has_id = true;
    } else if (key == "title") {
      s.title = value;
    } else if (key == "language") {
      s.language_tag = value;
    } else if (key == "keywords") {
      s.keywords = text::split_list(value);
    } else if (key == "guidelines") {
      s.guideline_ids = text::split_list(value);
    } else if (key == "status") {
      auto st = parse_status(value);
      if (!st) throw bad("unknown status '" + value + "'");
      s.status = *st;
    } else if (key == "role") {
      auto r = parse_contributor_role(value);
      if (!r) throw bad("unknown role '" + value + "'");
      s.submitted_by_role = *r;
    } else if (key == "created_at") {
      s.created_at = value;
    } else {
      throw bad("unknown header field '" + key + "'");
    }
  }
  if (!has_id || !is_valid_snippet_id(s.snippet_id)) throw bad("missing or invalid snippet id");
  return s;
}

SnippetBank::SnippetBank() : mutex_(std::make_unique<std::shared_mutex>()) {}
SnippetBank::SnippetBank(SnippetBank&&) noexcept = default;
SnippetBank& SnippetBank::operator=(SnippetBank&&) noexcept = default;
SnippetBank::~SnippetBank() = default;

SnippetBank SnippetBank::open(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  SnippetBank bank;
  bank.dir_ = dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create bank directory " + dir.string() + ": " + ec.message(), dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kSnippetExtension) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    Snippet s = parse_snippet(text::read_file(f), f.string());
    if (f.stem().string() != s.snippet_id) {
      throw Error(ErrorKind::IoError, f.string() + ": file name does not match snippet id " + s.snippet_id, f.string());
    }
    bank.last_number_ = std::max(bank.last_number_, snippet_number(s.snippet_id));
    bank.snippets_.emplace(s.snippet_id, std::move(s));
  }

  const auto archive = dir / kArchiveFile;
  if (fs::exists(archive)) {
    std::ifstream in(archive);
    std::string line;
    while (std::getline(in, line)) {
      if (text::is_blank(line)) continue;
      auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
      if (j.is_discarded() || !j.contains("id")) continue;  // torn tail line
      const auto id = j["id"].get<std::string>();
      if (!is_valid_snippet_id(id)) continue;
      bank.archived_.insert(id);
      bank.last_number_ = std::max(bank.last_number_, snippet_number(id));
    }
  }

  bank.rebuild_index();
  return bank;
}

SnippetBank::Index SnippetBank::build_index_locked() const {
  Index index;
  for (const auto& [id, s] : snippets_) {
    if (s.status != SnippetStatus::Curated) continue;
    for (const auto& k : s.keywords) index[k].insert(id);
  }
  return index;
}

void SnippetBank::rebuild_index() {
  std::unique_lock lock(*mutex_);
  keyword_index_ = build_index_locked();
  search_text_.clear();
  for (const auto& [id, s] : snippets_) {
    if (s.status == SnippetStatus::Curated) search_text_[id] = text::to_lower(s.title + "\n" + s.body);
  }
  persist_index_locked();
}

std::string SnippetBank::index_tsv() const {
  std::shared_lock lock(*mutex_);
  std::string out = "keyword\tsnippet_ids\n";
  for (const auto& [k, ids] : keyword_index_) {
    out += k + "\t" + text::join(std::vector<std::string>(ids.begin(), ids.end()), ",") + "\n";
  }
  return out;
}

void SnippetBank::persist_index_locked() const {
  if (!dir_) return;
  std::string out = "keyword\tsnippet_ids\n";
  for (const auto& [k, ids] : keyword_index_) {
    out += k + "\t" + text::join(std::vector<std::string>(ids.begin(), ids.end()), ",") + "\n";
  }
  text::write_file_atomic(*dir_ / kIndexFile, out);
}

void SnippetBank::persist_snippet_locked(const Snippet& s) const {
  if (!dir_) return;
  text::write_file_atomic(*dir_ / (s.snippet_id + std::string(kSnippetExtension)), serialize_snippet(s));
}

Snippet SnippetBank::add(const SnippetDraft& draft, std::string created_at) {
  Snippet s;
  s.title = std::string(text::trim(draft.title));
  if (s.title.empty()) throw Error(ErrorKind::InvalidDraft, "title is empty");
  if (draft.body.empty() || text::is_blank(draft.body)) throw Error(ErrorKind::InvalidDraft, "body is empty");
  if (draft.keywords.empty()) throw Error(ErrorKind::InvalidDraft, "at least one keyword is required");
  s.keywords = normalized_keywords(draft.keywords);
  if (!parse_language_tag(draft.language_tag)) {
    throw Error(ErrorKind::InvalidDraft, "unknown language tag '" + draft.language_tag + "'");
  }
  s.language_tag = draft.language_tag;
  for (const auto& g : draft.guideline_ids) {
    auto t = std::string(text::trim(g));
    if (t.empty()) throw Error(ErrorKind::InvalidDraft, "guideline ids must be non-empty");
    s.guideline_ids.push_back(std::move(t));
  }
  s.body = draft.body;
  s.submitted_by_role = draft.submitted_by_role;
  s.status = SnippetStatus::Candidate;
  s.created_at = created_at.empty() ? text::now_iso8601() : std::move(created_at);

  std::unique_lock lock(*mutex_);
  for (const auto& [id, existing] : snippets_) {
    if (existing.body == s.body) {
      throw Error(ErrorKind::DuplicateBody, "body is byte-identical to " + id, id);
    }
  }
  if (last_number_ >= kMaxSnippetNumber) throw Error(ErrorKind::InvalidDraft, "snippet id space exhausted");
  s.snippet_id = format_snippet_id(last_number_ + 1);
  persist_snippet_locked(s);
  ++last_number_;
  snippets_.emplace(s.snippet_id, s);
  return s;
}

Snippet SnippetBank::curate(std::string_view snippet_id, bool approve, std::string decided_at) {
  std::unique_lock lock(*mutex_);
  auto it = snippets_.find(std::string(snippet_id));
  if (it == snippets_.end()) {
    throw Error(ErrorKind::NotFound, "no live snippet " + std::string(snippet_id), std::string(snippet_id));
  }
  if (it->second.status == SnippetStatus::Curated) {
    throw Error(ErrorKind::AlreadyCurated, std::string(snippet_id) + " is already curated", std::string(snippet_id));
  }

  if (approve) {
    Snippet updated = it->second;
    updated.status = SnippetStatus::Curated;
    persist_snippet_locked(updated);
    it->second = updated;
    for (const auto& k : updated.keywords) keyword_index_[k].insert(updated.snippet_id);
    search_text_[updated.snippet_id] = text::to_lower(updated.title + "\n" + updated.body);
    persist_index_locked();
    return updated;
  }

  Snippet rejected = it->second;
  if (dir_) {
    nlohmann::json j{{"id", rejected.snippet_id},
                     {"rejected_at", decided_at.empty() ? text::now_iso8601() : decided_at},
                     {"title", rejected.title},
                     {"keywords", rejected.keywords},
                     {"role", to_string(rejected.submitted_by_role)},
                     {"body", rejected.body}};
    std::ofstream out(*dir_ / kArchiveFile, std::ios::app | std::ios::binary);
    out << j.dump() << "\n";
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, "cannot append to archive log");
    std::error_code ec;
    std::filesystem::remove(*dir_ / (rejected.snippet_id + std::string(kSnippetExtension)), ec);
  }
  archived_.insert(rejected.snippet_id);
  snippets_.erase(it);
  return rejected;
}

std::vector<SearchHit> SnippetBank::search(std::string_view query, std::size_t limit) const {
  std::shared_lock lock(*mutex_);
  return search_locked(query, limit);
}

std::vector<SearchHit> SnippetBank::search_locked(std::string_view query, std::size_t limit) const {
  const auto terms = query_terms(query);
  if (terms.empty()) throw Error(ErrorKind::EmptyQuery, "query has no searchable terms");

  std::vector<SearchHit> hits;
  for (const auto& [id, haystack] : search_text_) {
    SearchHit hit;
    hit.snippet_id = id;
    std::int64_t score = 0;
    for (const auto& term : terms) {
      auto k = keyword_index_.find(term);
      if (k != keyword_index_.end() && k->second.count(id)) {
        score += kKeywordMatchWeight;
        hit.matched_keywords.push_back(term);
      } else if (haystack.find(term) != std::string::npos) {
        score += kSubstringMatchWeight;
      }
    }
    if (score == 0) continue;
    hit.score = Rational(score);
    hits.push_back(std::move(hit));
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return b.score < a.score;
    return a.snippet_id < b.snippet_id;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

Snippet SnippetBank::lookup(std::string_view snippet_id) const {
  std::shared_lock lock(*mutex_);
  auto it = snippets_.find(std::string(snippet_id));
  if (it != snippets_.end()) return it->second;
  const std::string id(snippet_id);
  if (archived_.count(id)) {
    throw Error(ErrorKind::NotFound, id + " was rejected during curation and is archived", id);
  }
  throw Error(ErrorKind::NotFound, "no snippet " + id, id);
}

bool SnippetBank::contains(std::string_view snippet_id) const {
  std::shared_lock lock(*mutex_);
  return snippets_.count(std::string(snippet_id)) > 0;
}

bool SnippetBank::is_recommendable(std::string_view snippet_id) const {
  std::shared_lock lock(*mutex_);
  auto it = snippets_.find(std::string(snippet_id));
  return it != snippets_.end() && it->second.status == SnippetStatus::Curated;
}

bool SnippetBank::is_archived(std::string_view snippet_id) const {
  std::shared_lock lock(*mutex_);
  return archived_.count(std::string(snippet_id)) > 0;
}

std::vector<Snippet> SnippetBank::snippets() const {
  std::shared_lock lock(*mutex_);
  std::vector<Snippet> out;
  for (const auto& [id, s] : snippets_) out.push_back(s);
  return out;
}

std::size_t SnippetBank::size() const {
  std::shared_lock lock(*mutex_);
  return snippets_.size();
}

}  // namespace utpada
