#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace utpada {

enum class LanguageTag { Css, Html, KotlinLike, JsLike, Other };

std::string_view to_string(LanguageTag tag);
std::optional<LanguageTag> parse_language_tag(std::string_view name);
// nullopt for extensions the analyzer does not ingest.
std::optional<LanguageTag> language_for_path(const std::filesystem::path& path);
bool is_brace_language(LanguageTag tag);

enum class TokenKind {
  Word,   // identifier or number run
  Punct,  // any single non-identifier, non-space character
  Text,   // whitespace-separated piece of a string literal, quotes dropped
};

struct Token {
  std::string text;
  std::uint32_t line = 0;  // 1-based
  TokenKind kind = TokenKind::Word;
  bool space_before = false;  // whitespace (or a stripped comment) precedes it
  bool literal_tail = false;  // a later word of the same string literal

  friend bool operator==(const Token&, const Token&) = default;
};

// Replaces comment text with spaces, keeping newlines so line numbers are
// stable. Comment syntax depends on the tag: `/* */` for css, `//` and `/* */`
// for brace languages, `<!-- -->` for html, nothing for other.
std::string strip_comments(std::string_view raw, LanguageTag tag);

// One entry per physical line: whitespace runs collapsed, ends trimmed.
std::vector<std::string> normalize_lines(std::string_view stripped);

// Splits on identifier/punctuation boundaries. A string literal contributes
// its whitespace-separated words as Text tokens (a literal with no words
// contributes a single `""`). Literals end at the closing quote or at the end
// of the line, whichever comes first.
std::vector<Token> tokenize(std::string_view stripped, LanguageTag tag);

// Tokenization applied to TokenSeq pattern payloads.
std::vector<Token> tokenize_pattern(std::string_view payload);

}  // namespace utpada
