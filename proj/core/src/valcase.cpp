#include "utpada/valcase.hpp"

#include <algorithm>
#include <optional>

#include "utpada/error.hpp"
#include "utpada/css.hpp"
#include "utpada/snippetbank.hpp"
#include "utpada/text.hpp"

namespace utpada {
namespace {

[[noreturn]] void malformed(std::string_view origin, std::size_t line, std::string_view field,
                            const std::string& why) {
  std::string msg(origin);
  if (line > 0) msg += ":" + std::to_string(line);
  msg += ": ";
  msg += field;
  msg += ": " + why;
  throw Error(ErrorKind::MalformedCase, msg, std::string(origin));
}

CssDeclPattern parse_css_payload(std::string_view payload) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = payload.find("::", start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(text::trim(payload.substr(start)));
      break;
    }
    parts.emplace_back(text::trim(payload.substr(start, pos - start)));
    start = pos + 2;
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("cssdecl payload must be '<selector> :: <property> :: <predicate>'");
  }
  CssDeclPattern p;
  p.selector = css::normalize_selector(parts[0]);
  p.property = text::to_lower(parts[1]);
  if (p.selector.empty()) throw std::invalid_argument("cssdecl selector is empty");
  if (p.property.empty()) throw std::invalid_argument("cssdecl property name is empty");

  const std::string_view pred = parts[2];
  if (text::starts_with(pred, "!=")) {
    p.predicate = CssPredicateKind::NotEquals;
    p.value = css::normalize_value(pred.substr(2));
  } else if (text::starts_with(pred, "=")) {
    p.predicate = CssPredicateKind::Equals;
    p.value = css::normalize_value(pred.substr(1));
  } else if (pred == "present") {
    p.predicate = CssPredicateKind::Present;
  } else if (pred == "absent") {
    p.predicate = CssPredicateKind::Absent;
  } else {
    throw std::invalid_argument("cssdecl predicate must be =<v>, !=<v>, present or absent");
  }
  if ((p.predicate == CssPredicateKind::Equals || p.predicate == CssPredicateKind::NotEquals) &&
      p.value.empty()) {
    throw std::invalid_argument("cssdecl comparison value is empty");
  }
  return p;
}

std::string css_payload_text(const CssDeclPattern& p) {
  std::string out = p.selector + " :: " + p.property + " :: ";
  switch (p.predicate) {
    case CssPredicateKind::Equals: return out + "=" + p.value;
    case CssPredicateKind::NotEquals: return out + "!=" + p.value;
    case CssPredicateKind::Present: return out + "present";
    case CssPredicateKind::Absent: return out + "absent";
  }
  return out;
}

}  // namespace

Pattern Pattern::token_seq(std::string_view payload) {
  Pattern p;
  p.kind_ = PatternKind::TokenSeq;
  for (auto& t : tokenize_pattern(payload)) p.tokens_.push_back(std::move(t.text));
  if (p.tokens_.empty()) throw std::invalid_argument("tokenseq payload has no tokens");
  p.payload_ = text::collapse_whitespace(payload);
  return p;
}

Pattern Pattern::regex(std::string_view payload) {
  Pattern p;
  p.kind_ = PatternKind::Regex;
  p.payload_ = std::string(text::trim(payload));
  if (p.payload_.empty()) throw std::invalid_argument("regex payload is empty");
  try {
    p.regex_ = std::make_shared<const std::regex>(p.payload_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw std::invalid_argument(std::string("regex does not compile: ") + e.what());
  }
  return p;
}

Pattern Pattern::css_decl(std::string_view payload) {
  Pattern p;
  p.kind_ = PatternKind::CssDecl;
  p.css_ = parse_css_payload(payload);
  p.payload_ = css_payload_text(p.css_);
  return p;
}

Pattern Pattern::from_case_file(std::string_view kind, std::string_view payload) {
  if (kind == "tokenseq") return token_seq(payload);
  if (kind == "regex") return regex(payload);
  if (kind == "cssdecl") return css_decl(payload);
  throw std::invalid_argument("unknown pattern kind '" + std::string(kind) + "'");
}

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::TokenSeq: return "tokenseq";
    case PatternKind::Regex: return "regex";
    case PatternKind::CssDecl: return "cssdecl";
  }
  return "tokenseq";
}

bool ValidationCase::applies(std::string_view relative_path) const {
  return std::any_of(applies_to.begin(), applies_to.end(),
                     [&](const Glob& g) { return g.matches(relative_path); });
}

ValidationCase parse_case(std::string_view contents, std::string_view origin) {
  ValidationCase c;
  std::optional<std::size_t> id_line, guideline_line, desc_line, applies_line, remediate_line;

  struct PendingPattern {
    std::size_t line = 0;
    PatternRole role = PatternRole::Required;
    std::optional<std::string> kind;
  };
  std::optional<PendingPattern> pending;

  const auto lines = text::split(contents, '\n');
  std::size_t line_no = 0;
  for (const auto& raw_line : lines) {
    ++line_no;
    std::string_view line = raw_line;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) malformed(origin, line_no, "line", "expected '<key>: <value>'");
    const std::string key(text::trim(line.substr(0, colon)));
    const std::string_view value = text::trim(line.substr(colon + 1));

    auto once = [&](std::optional<std::size_t>& seen) {
      if (seen) malformed(origin, line_no, key, "repeated (first at line " + std::to_string(*seen) + ")");
      seen = line_no;
    };

    if (pending && key != "kind" && key != "match") {
      malformed(origin, line_no, key,
                "pattern block opened at line " + std::to_string(pending->line) +
                    " must continue with 'kind:' then 'match:'");
    }

    if (key == "id") {
      once(id_line);
      c.case_id = std::string(value);
      if (c.case_id.empty()) malformed(origin, line_no, key, "case id is empty");
    } else if (key == "guideline") {
      once(guideline_line);
      c.guideline_id = std::string(value);
      if (c.guideline_id.empty()) malformed(origin, line_no, key, "guideline id is empty");
    } else if (key == "desc") {
      once(desc_line);
      c.description = std::string(value);
    } else if (key == "applies") {
      once(applies_line);
      for (const auto& g : text::split_list(value)) {
        std::string why;
        auto glob = Glob::compile(g, &why);
        if (!glob) malformed(origin, line_no, key, "bad glob '" + g + "': " + why);
        c.applies_to.push_back(std::move(*glob));
      }
      if (c.applies_to.empty()) malformed(origin, line_no, key, "no globs listed");
    } else if (key == "pattern") {
      PendingPattern p;
      p.line = line_no;
      if (value == "required") {
        p.role = PatternRole::Required;
      } else if (value == "anti") {
        p.role = PatternRole::Anti;
      } else {
        malformed(origin, line_no, key, "must be 'required' or 'anti'");
      }
      pending = p;
    } else if (key == "kind") {
      if (!pending) malformed(origin, line_no, key, "'kind:' outside a pattern block");
      if (pending->kind) malformed(origin, line_no, key, "repeated within pattern block");
      if (value != "tokenseq" && value != "regex" && value != "cssdecl") {
        malformed(origin, line_no, key, "must be tokenseq, regex or cssdecl");
      }
      pending->kind = std::string(value);
    } else if (key == "match") {
      if (!pending || !pending->kind) malformed(origin, line_no, key, "'match:' must follow 'pattern:' and 'kind:'");
      // The payload keeps everything after the first colon, including further colons.
      try {
        auto pattern = Pattern::from_case_file(*pending->kind, value);
        (pending->role == PatternRole::Required ? c.required_patterns : c.anti_patterns)
            .push_back(std::move(pattern));
      } catch (const std::invalid_argument& e) {
        malformed(origin, line_no, key, e.what());
      }
      pending.reset();
    } else if (key == "remediate") {
      once(remediate_line);
      for (const auto& id : text::split_list(value)) {
        if (!is_valid_snippet_id(id)) malformed(origin, line_no, key, "'" + id + "' is not a snippet id (SNIP-nnnnnn)");
        c.remediation_snippet_ids.push_back(id);
      }
    } else {
      malformed(origin, line_no, key, "unknown field");
    }
  }

  if (pending) malformed(origin, pending->line, "pattern", "block is missing 'kind:' or 'match:'");
  if (!id_line) malformed(origin, 0, "id", "missing mandatory field");
  if (!guideline_line) malformed(origin, 0, "guideline", "missing mandatory field");
  if (!applies_line) malformed(origin, 0, "applies", "missing mandatory field");
  if (c.required_patterns.empty() && c.anti_patterns.empty()) {
    malformed(origin, 0, "pattern", "case needs at least one required or anti pattern");
  }
  return c;
}

ValidationCase parse_case_file(const std::filesystem::path& path) {
  std::string contents;
  try {
    contents = text::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::MalformedCase, path.string() + ": unreadable: " + e.what(), path.string());
  }
  return parse_case(contents, path.string());
}

std::string serialize_case(const ValidationCase& c) {
  std::string out;
  out += "id: " + c.case_id + "\n";
  out += "guideline: " + c.guideline_id + "\n";
  out += "desc: " + c.description + "\n";
  std::vector<std::string> globs;
  for (const auto& g : c.applies_to) globs.push_back(g.pattern());
  out += "applies: " + text::join(globs, ",") + "\n";
  auto emit = [&](const Pattern& p, std::string_view role) {
    out += "\npattern: ";
    out += role;
    out += "\nkind: ";
    out += to_string(p.kind());
    out += "\nmatch: " + p.payload() + "\n";
  };
  for (const auto& p : c.required_patterns) emit(p, "required");
  for (const auto& p : c.anti_patterns) emit(p, "anti");
  if (!c.remediation_snippet_ids.empty()) {
    out += "\nremediate: " + text::join(c.remediation_snippet_ids, ",") + "\n";
  }
  return out;
}

void insert_case(std::vector<ValidationCase>& set, ValidationCase c) {
  for (const auto& existing : set) {
    if (existing.case_id == c.case_id) {
      throw Error(ErrorKind::DuplicateCaseId, "case id '" + c.case_id + "' is already loaded", c.case_id);
    }
  }
  set.push_back(std::move(c));
}

std::vector<ValidationCase> load_case_set(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::IoError, "case directory not found: " + dir.string(), dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == kCaseFileExtension) {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw Error(ErrorKind::EmptyCaseSet, "no " + std::string(kCaseFileExtension) + " files in " + dir.string(), dir.string());
  std::sort(files.begin(), files.end());

  std::vector<ValidationCase> set;
  for (const auto& f : files) {
    auto c = parse_case_file(f);
    for (const auto& existing : set) {
      if (existing.case_id == c.case_id) {
        throw Error(ErrorKind::DuplicateCaseId,
                    f.string() + ": case id '" + c.case_id + "' is already loaded", f.string());
      }
    }
    set.push_back(std::move(c));
  }
  std::sort(set.begin(), set.end(),
            [](const ValidationCase& a, const ValidationCase& b) { return a.case_id < b.case_id; });
  return set;
}

}  // namespace utpada
