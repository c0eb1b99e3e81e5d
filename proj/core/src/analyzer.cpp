#include "utpada/analyzer.hpp"

#include <algorithm>
#include <future>
#include <tuple>
#include <thread>

#include "utpada/error.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/text.hpp"

namespace utpada {
namespace {

namespace fs = std::filesystem;

bool looks_binary(std::string_view contents) {
  return contents.substr(0, 8192).find('\0') != std::string_view::npos;
}

bool is_within(const fs::path& root, const fs::path& p) {
  auto r = root.begin();
  auto q = p.begin();
  for (; r != root.end(); ++r, ++q) {
    if (q == p.end() || *r != *q) return false;
  }
  return true;
}

std::vector<LineSpan> match_tokens(const std::vector<std::string>& needle, const std::vector<Token>& hay) {
  std::vector<LineSpan> out;
  const std::size_t m = needle.size();
  if (m == 0 || hay.size() < m) return out;

  // KMP failure function over the pattern tokens.
  std::vector<std::size_t> fail(m, 0);
  for (std::size_t i = 1, k = 0; i < m; ++i) {
    while (k > 0 && needle[i] != needle[k]) k = fail[k - 1];
    if (needle[i] == needle[k]) ++k;
    fail[i] = k;
  }
  for (std::size_t i = 0, k = 0; i < hay.size(); ++i) {
    while (k > 0 && hay[i].text != needle[k]) k = fail[k - 1];
    if (hay[i].text == needle[k]) ++k;
    if (k == m) {
      out.push_back({hay[i + 1 - m].line, hay[i].line});
      k = fail[k - 1];
    }
  }
  return out;
}

std::vector<LineSpan> match_regex(const std::regex& re, const std::vector<std::string>& lines) {
  std::vector<LineSpan> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (std::regex_search(lines[i], re)) {
      const auto line = static_cast<std::uint32_t>(i + 1);
      out.push_back({line, line});
    }
  }
  return out;
}

std::vector<LineSpan> match_css(const CssDeclPattern& p, const std::vector<css::RuleBlock>& rules) {
  std::vector<LineSpan> out;
  for (const auto& block : rules) {
    if (!css::selector_matches(block.selector, p.selector)) continue;
    const css::Declaration* d = block.find(p.property);
    bool hit = false;
    switch (p.predicate) {
      case CssPredicateKind::Equals: hit = d && css::normalize_value(d->value) == p.value; break;
      case CssPredicateKind::NotEquals: hit = d && css::normalize_value(d->value) != p.value; break;
      case CssPredicateKind::Present: hit = d != nullptr; break;
      case CssPredicateKind::Absent: hit = d == nullptr; break;
    }
    if (hit) out.push_back({block.first_line, block.last_line});
  }
  return out;
}

std::optional<LineSpan> earliest_match(const std::vector<Pattern>& patterns, const SourceFile& file,
                                       std::vector<Diagnostic>* diagnostics) {
  std::optional<LineSpan> best;
  for (const auto& p : patterns) {
    const auto spans = match_pattern(p, file, diagnostics);
    if (!spans.empty() && (!best || spans.front() < *best)) best = spans.front();
  }
  return best;
}

}  // namespace

SourceFile SourceFile::from_text(std::string path, LanguageTag language, std::string raw) {
  SourceFile f;
  f.path = std::move(path);
  f.language = language;
  f.raw = std::move(raw);
  f.stripped = strip_comments(f.raw, language);
  f.lines = normalize_lines(f.stripped);
  f.tokens = tokenize(f.stripped, language);
  if (language == LanguageTag::Css) f.css_rules = css::parse_stylesheet(f.stripped);
  return f;
}

const SourceFile* SourceTree::find(std::string_view path) const {
  for (const auto& f : files) {
    if (f.path == path) return &f;
  }
  return nullptr;
}

SourceTree load_source_tree(const fs::path& root, const SourceTreeOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::IoError, "source root is not a directory: " + root.string(), root.string());
  }
  SourceTree tree;
  tree.root = fs::weakly_canonical(root);

  fs::recursive_directory_iterator it(tree.root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot scan " + root.string() + ": " + ec.message(), root.string());
  for (; it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      tree.diagnostics.push_back({"", "scan error: " + ec.message(), ""});
      ec.clear();
      continue;
    }
    const auto& entry = *it;
    const std::string rel = entry.path().lexically_relative(tree.root).generic_string();
    if (!entry.is_regular_file(ec)) continue;
    auto language = language_for_path(entry.path());
    if (!language) continue;

    if (entry.is_symlink(ec)) {
      const auto target = fs::weakly_canonical(entry.path(), ec);
      if (ec || !is_within(tree.root, target)) {
        tree.diagnostics.push_back({rel, "skipped: symlink resolves outside the source root", ""});
        ec.clear();
        continue;
      }
    }
    const auto size = entry.file_size(ec);
    if (ec) {
      tree.diagnostics.push_back({rel, "IoError: " + ec.message(), ""});
      ec.clear();
      continue;
    }
    if (size > options.max_file_bytes) {
      tree.diagnostics.push_back({rel, "skipped: file exceeds size cap of " + std::to_string(options.max_file_bytes) + " bytes", ""});
      continue;
    }
    std::string raw;
    try {
      raw = text::read_file(entry.path());
    } catch (const Error& e) {
      tree.diagnostics.push_back({rel, e.what(), ""});
      continue;
    }
    if (looks_binary(raw)) {
      tree.diagnostics.push_back({rel, "skipped: binary content", ""});
      continue;
    }
    tree.files.push_back(SourceFile::from_text(rel, *language, std::move(raw)));
  }
  std::sort(tree.files.begin(), tree.files.end(),
            [](const SourceFile& a, const SourceFile& b) { return a.path < b.path; });
  std::sort(tree.diagnostics.begin(), tree.diagnostics.end(),
            [](const Diagnostic& a, const Diagnostic& b) { return std::tie(a.path, a.message) < std::tie(b.path, b.message); });
  if (tree.files.empty()) {
    throw Error(ErrorKind::EmptyTree, "no recognized source files under " + root.string(), root.string());
  }
  return tree;
}

std::vector<LineSpan> match_pattern(const Pattern& pattern, const SourceFile& file,
                                    std::vector<Diagnostic>* diagnostics) {
  switch (pattern.kind()) {
    case PatternKind::TokenSeq: return match_tokens(pattern.tokens(), file.tokens);
    case PatternKind::Regex: return match_regex(pattern.compiled(), file.lines);
    case PatternKind::CssDecl:
      if (file.language != LanguageTag::Css) {
        if (diagnostics) {
          diagnostics->push_back({file.path,
                                  "LanguageMismatch: cssdecl pattern applied to " +
                                      std::string(to_string(file.language)) + " file",
                                  ""});
        }
        return {};
      }
      return match_css(pattern.css(), file.css_rules);
  }
  return {};
}

std::string_view to_string(FindingStatus s) {
  switch (s) {
    case FindingStatus::Correct: return "Correct";
    case FindingStatus::Incorrect: return "Incorrect";
    case FindingStatus::Missing: return "Missing";
    case FindingStatus::NotApplicable: return "NotApplicable";
  }
  return "NotApplicable";
}

ValidationFinding evaluate_case(const ValidationCase& c, const SourceFile& file,
                                const SnippetFilter& recommendable, std::vector<Diagnostic>* diagnostics) {
  ValidationFinding f;
  f.case_id = c.case_id;
  f.guideline_id = c.guideline_id;
  f.path = file.path;
  if (!c.applies(file.path)) {
    f.status = FindingStatus::NotApplicable;
    return f;
  }
  std::vector<Diagnostic> local;
  if (auto anti = earliest_match(c.anti_patterns, file, &local)) {
    f.status = FindingStatus::Incorrect;
    f.location = anti;
  } else if (auto req = earliest_match(c.required_patterns, file, &local)) {
    f.status = FindingStatus::Correct;
    f.location = req;
  } else {
    f.status = FindingStatus::Missing;
  }
  if (diagnostics) {
    for (auto& d : local) {
      d.case_id = c.case_id;
      if (std::find(diagnostics->begin(), diagnostics->end(), d) == diagnostics->end()) {
        diagnostics->push_back(std::move(d));
      }
    }
  }
  if (f.status == FindingStatus::Incorrect || f.status == FindingStatus::Missing) {
    for (const auto& id : c.remediation_snippet_ids) {
      if (recommendable && recommendable(id)) f.recommended_snippet_ids.push_back(id);
    }
  }
  return f;
}

ValidationReport run_validation(const SourceTree& tree, const std::vector<ValidationCase>& cases,
                                const SnippetFilter& recommendable, const ValidationOptions& options) {
  if (cases.empty()) throw Error(ErrorKind::EmptyCaseSet, "no validation cases to run");

  ValidationReport report;
  report.generated_at = options.timestamp.empty() ? text::now_iso8601() : options.timestamp;
  report.cases_run = cases.size();
  report.files_scanned = tree.files.size();
  report.diagnostics = tree.diagnostics;

  struct Chunk {
    std::vector<ValidationFinding> findings;
    std::vector<Diagnostic> diagnostics;
  };
  auto evaluate_range = [&](std::size_t begin, std::size_t end) {
    Chunk chunk;
    for (std::size_t i = begin; i < end; ++i) {
      for (const auto& file : tree.files) {
        chunk.findings.push_back(evaluate_case(cases[i], file, recommendable, &chunk.diagnostics));
      }
    }
    return chunk;
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(cases.size())));
  std::vector<Chunk> chunks;
  if (workers == 1) {
    chunks.push_back(evaluate_range(0, cases.size()));
  } else {
    std::vector<std::future<Chunk>> futures;
    const std::size_t per = (cases.size() + workers - 1) / workers;
    for (std::size_t b = 0; b < cases.size(); b += per) {
      futures.push_back(std::async(std::launch::async, evaluate_range, b, std::min(cases.size(), b + per)));
    }
    for (auto& fut : futures) chunks.push_back(fut.get());
  }
  std::vector<Diagnostic> case_diags;
  for (auto& c : chunks) {
    for (auto& f : c.findings) report.findings.push_back(std::move(f));
    for (auto& d : c.diagnostics) case_diags.push_back(std::move(d));
  }
  std::sort(report.findings.begin(), report.findings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.case_id, a.path) < std::tie(b.case_id, b.path);
  });
  std::sort(case_diags.begin(), case_diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.case_id, a.path, a.message) < std::tie(b.case_id, b.path, b.message);
  });
  for (auto& d : case_diags) report.diagnostics.push_back(std::move(d));

  std::uint64_t h = text::fnv1a64("utpada-run");
  for (const auto& c : cases) h = text::fnv1a64(serialize_case(c), h);
  for (const auto& f : tree.files) {
    h = text::fnv1a64(f.path, h);
    h = text::fnv1a64(f.raw, h);
  }
  h = text::fnv1a64(report.generated_at, h);
  report.run_id = text::hex64(h);
  return report;
}

ValidationReport run_validation(const SourceTree& tree, const std::vector<ValidationCase>& cases,
                                const SnippetBank& bank, const ValidationOptions& options) {
  return run_validation(
      tree, cases, [&bank](std::string_view id) { return bank.is_recommendable(id); }, options);
}

std::vector<CaseCounts> ValidationReport::counts() const {
  std::vector<CaseCounts> rows;
  for (const auto& f : findings) {
    if (rows.empty() || rows.back().case_id != f.case_id) {
      rows.push_back({f.case_id, f.guideline_id, 0, 0, 0, 0});
    }
    auto& r = rows.back();
    switch (f.status) {
      case FindingStatus::Correct: ++r.correct; break;
      case FindingStatus::Incorrect: ++r.incorrect; break;
      case FindingStatus::Missing: ++r.missing; break;
      case FindingStatus::NotApplicable: ++r.not_applicable; break;
    }
  }
  return rows;
}

bool ValidationReport::has_violations() const {
  return std::any_of(findings.begin(), findings.end(), [](const ValidationFinding& f) {
    return f.status == FindingStatus::Incorrect || f.status == FindingStatus::Missing;
  });
}

}  // namespace utpada
