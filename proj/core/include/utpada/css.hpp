#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace utpada::css {

struct Declaration {
  std::string property;  // lowercased
  std::string value;     // raw text, trimmed
  std::uint32_t line = 0;
};

struct RuleBlock {
  std::string selector;  // normalized, see normalize_selector
  std::vector<Declaration> declarations;
  std::uint32_t first_line = 0;
  std::uint32_t last_line = 0;

  // Last declaration wins, as in the cascade within one block.
  const Declaration* find(std::string_view property) const;
};

// Parses comment-stripped stylesheet text into rule blocks in document order.
// Conditional group rules (@media, @supports, ...) are flattened into their
// child rules. Malformed input never throws; an unterminated block runs to
// the end of the text.
std::vector<RuleBlock> parse_stylesheet(std::string_view stripped);

// Whitespace collapsed and comma-separated parts re-joined with ", ".
std::string normalize_selector(std::string_view selector);
// Lowercased, whitespace collapsed, trailing `!important` removed.
std::string normalize_value(std::string_view value);

// True if `block_selector` is `wanted` or lists it as one of its comma parts.
bool selector_matches(std::string_view block_selector, std::string_view wanted);

}  // namespace utpada::css
