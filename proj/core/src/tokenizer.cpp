#include "utpada/tokenizer.hpp"

#include <array>
#include <cctype>

#include "utpada/text.hpp"

namespace utpada {
namespace {

bool is_ident_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_' || c == '$';
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_string_delimiter(char c, LanguageTag tag) {
  switch (tag) {
    case LanguageTag::JsLike: return c == '"' || c == '\'' || c == '`';
    case LanguageTag::KotlinLike:
    case LanguageTag::Css:
    case LanguageTag::Html: return c == '"' || c == '\'';
    case LanguageTag::Other: return false;
  }
  return false;
}

struct StringSpan {
  std::size_t end;  // one past the closing quote, or the terminating newline / end
  bool closed;
};

// A literal ends at its closing quote. At a line break it continues only when
// the next line holds the closing quote (wrapped listings) or, for template
// literals, unconditionally.
StringSpan scan_string(std::string_view s, std::size_t open) {
  const char quote = s[open];
  std::size_t i = open + 1;
  while (i < s.size()) {
    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] != '\n') {
      i += 2;
      continue;
    }
    if (s[i] == quote) return {i + 1, true};
    if (s[i] == '\n' && quote != '`') {
      const auto next_end = s.find('\n', i + 1);
      const auto next = s.substr(i + 1, next_end == std::string_view::npos ? std::string_view::npos : next_end - i - 1);
      if (next.find(quote) == std::string_view::npos) return {i, false};
    }
    ++i;
  }
  return {i, false};
}

std::size_t skip_string(std::string_view s, std::size_t open) { return scan_string(s, open).end; }

void blank_out(std::string& out, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to; ++i) {
    if (out[i] != '\n') out[i] = ' ';
  }
}

}  // namespace

std::string_view to_string(LanguageTag tag) {
  switch (tag) {
    case LanguageTag::Css: return "css";
    case LanguageTag::Html: return "html";
    case LanguageTag::KotlinLike: return "kotlin-like";
    case LanguageTag::JsLike: return "js-like";
    case LanguageTag::Other: return "other";
  }
  return "other";
}

std::optional<LanguageTag> parse_language_tag(std::string_view name) {
  for (auto tag : {LanguageTag::Css, LanguageTag::Html, LanguageTag::KotlinLike,
                   LanguageTag::JsLike, LanguageTag::Other}) {
    if (to_string(tag) == name) return tag;
  }
  return std::nullopt;
}

std::optional<LanguageTag> language_for_path(const std::filesystem::path& path) {
  const std::string ext = text::to_lower(path.extension().string());
  static constexpr std::array css{".css", ".scss", ".less"};
  static constexpr std::array html{".html", ".htm", ".xml", ".xhtml", ".vue"};
  static constexpr std::array kotlin{".kt", ".kts", ".java", ".scala", ".gradle", ".swift"};
  static constexpr std::array js{".js", ".jsx", ".ts", ".tsx", ".mjs", ".cjs"};
  static constexpr std::array other{".txt", ".md", ".json", ".properties", ".yaml", ".yml"};
  auto in = [&](const auto& list) {
    for (const char* e : list) {
      if (ext == e) return true;
    }
    return false;
  };
  if (in(css)) return LanguageTag::Css;
  if (in(html)) return LanguageTag::Html;
  if (in(kotlin)) return LanguageTag::KotlinLike;
  if (in(js)) return LanguageTag::JsLike;
  if (in(other)) return LanguageTag::Other;
  return std::nullopt;
}

bool is_brace_language(LanguageTag tag) {
  return tag == LanguageTag::KotlinLike || tag == LanguageTag::JsLike;
}

std::string strip_comments(std::string_view raw, LanguageTag tag) {
  std::string out(raw);
  if (tag == LanguageTag::Other) return out;

  if (tag == LanguageTag::Html) {
    std::size_t pos = 0;
    while ((pos = out.find("<!--", pos)) != std::string::npos) {
      auto end = out.find("-->", pos + 4);
      end = end == std::string::npos ? out.size() : end + 3;
      blank_out(out, pos, end);
      pos = end;
    }
    return out;
  }

  const bool line_comments = is_brace_language(tag);
  std::size_t i = 0;
  while (i < out.size()) {
    const char c = out[i];
    if (is_string_delimiter(c, tag)) {
      i = skip_string(out, i);
      continue;
    }
    if (c == '/' && i + 1 < out.size()) {
      if (out[i + 1] == '*') {
        auto end = out.find("*/", i + 2);
        end = end == std::string::npos ? out.size() : end + 2;
        blank_out(out, i, end);
        i = end;
        continue;
      }
      if (line_comments && out[i + 1] == '/') {
        auto end = out.find('\n', i);
        if (end == std::string::npos) end = out.size();
        blank_out(out, i, end);
        i = end;
        continue;
      }
    }
    ++i;
  }
  return out;
}

std::vector<std::string> normalize_lines(std::string_view stripped) {
  std::vector<std::string> lines;
  for (const auto& line : text::split(stripped, '\n')) {
    lines.push_back(text::collapse_whitespace(line));
  }
  if (!lines.empty() && lines.back().empty() && !stripped.empty() && stripped.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

std::vector<Token> tokenize(std::string_view s, LanguageTag tag) {
  std::vector<Token> tokens;
  std::uint32_t line = 1;
  bool space = false;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      ++line;
      space = true;
      ++i;
    } else if (is_space(c)) {
      space = true;
      ++i;
    } else if (is_ident_char(c)) {
      std::size_t j = i;
      while (j < s.size() && is_ident_char(s[j])) ++j;
      tokens.push_back({std::string(s.substr(i, j - i)), line, TokenKind::Word, space});
      space = false;
      i = j;
    } else if (is_string_delimiter(c, tag)) {
      const auto [end, closed] = scan_string(s, i);
      const std::size_t content_end = closed ? end - 1 : end;
      const std::string_view content = s.substr(i + 1, content_end - (i + 1));
      bool first = true;
      const std::uint32_t open_line = line;
      std::size_t w = 0;
      while (w < content.size()) {
        if (content[w] == '\n') ++line;
        if (is_space(content[w])) {
          ++w;
          continue;
        }
        std::size_t e = w;
        while (e < content.size() && !is_space(content[e])) ++e;
        tokens.push_back({std::string(content.substr(w, e - w)), line, TokenKind::Text, first ? space : true, !first});
        first = false;
        w = e;
      }
      if (first) tokens.push_back({"\"\"", open_line, TokenKind::Text, space});
      space = false;
      i = end;
    } else {
      tokens.push_back({std::string(1, c), line, TokenKind::Punct, space});
      space = false;
      ++i;
    }
  }
  return tokens;
}

std::vector<Token> tokenize_pattern(std::string_view payload) {
  return tokenize(payload, LanguageTag::KotlinLike);
}

}  // namespace utpada
