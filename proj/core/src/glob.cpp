#include "utpada/glob.hpp"

#include <vector>

#include "utpada/text.hpp"

namespace utpada {
namespace {

bool segment_matches(std::string_view pat, std::string_view seg) {
  // Classic two-pointer wildcard match with single-star backtracking.
  std::size_t p = 0, s = 0, star = std::string_view::npos, mark = 0;
  while (s < seg.size()) {
    if (p < pat.size() && pat[p] == '*') {
      star = p++;
      mark = s;
    } else if (p < pat.size() && pat[p] == seg[s]) {
      ++p;
      ++s;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      s = ++mark;
    } else {
      return false;
    }
  }
  while (p < pat.size() && pat[p] == '*') ++p;
  return p == pat.size();
}

bool match_segments(const std::vector<std::string>& pat, std::size_t pi,
                    const std::vector<std::string>& path, std::size_t si) {
  if (pi == pat.size()) return si == path.size();
  if (pat[pi] == "**") {
    for (std::size_t k = si; k <= path.size(); ++k) {
      if (match_segments(pat, pi + 1, path, k)) return true;
    }
    return false;
  }
  if (si == path.size()) return false;
  return segment_matches(pat[pi], path[si]) && match_segments(pat, pi + 1, path, si + 1);
}

}  // namespace

std::optional<Glob> Glob::compile(std::string_view pattern, std::string* why) {
  auto fail = [&](const char* reason) -> std::optional<Glob> {
    if (why) *why = reason;
    return std::nullopt;
  };
  pattern = text::trim(pattern);
  if (pattern.empty()) return fail("empty glob");
  if (pattern.front() == '/') return fail("glob must be relative to the source root");
  for (const auto& seg : text::split(pattern, '/')) {
    if (seg.empty()) return fail("empty path segment in glob");
    if (seg == "..") return fail("'..' is not allowed in globs");
    if (seg != "**" && seg.find("**") != std::string::npos) {
      return fail("'**' must be a whole path segment");
    }
  }
  return Glob(std::string(pattern));
}

bool Glob::matches(std::string_view relative_path) const {
  return match_segments(text::split(pattern_, '/'), 0, text::split(relative_path, '/'), 0);
}

}  // namespace utpada
