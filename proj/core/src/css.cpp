#include "utpada/css.hpp"

#include <cctype>

#include "utpada/text.hpp"

namespace utpada::css {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  std::vector<RuleBlock> run() {
    std::vector<RuleBlock> out;
    parse_rules(out, /*nested=*/false);
    return out;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }

  void advance() {
    if (s_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_string() {
    const char quote = s_[pos_];
    advance();
    while (!at_end() && s_[pos_] != quote && s_[pos_] != '\n') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) advance();
      advance();
    }
    if (!at_end() && s_[pos_] == quote) advance();
  }

  void parse_rules(std::vector<RuleBlock>& out, bool nested) {
    std::size_t prelude_start = pos_;
    std::uint32_t prelude_line = 0;
    while (!at_end()) {
      const char c = s_[pos_];
      if (c == '"' || c == '\'') {
        if (prelude_line == 0) prelude_line = line_;
        skip_string();
        continue;
      }
      if (c == '}') {
        advance();
        if (nested) return;
        prelude_start = pos_;
        prelude_line = 0;
        continue;
      }
      if (c == ';') {
        advance();
        prelude_start = pos_;
        prelude_line = 0;
        continue;
      }
      if (c == '{') {
        const std::string prelude = text::collapse_whitespace(s_.substr(prelude_start, pos_ - prelude_start));
        const std::uint32_t first_line = prelude_line ? prelude_line : line_;
        advance();
        if (is_group_rule(prelude)) {
          parse_rules(out, /*nested=*/true);
        } else {
          RuleBlock block;
          block.selector = normalize_selector(prelude);
          block.first_line = first_line;
          parse_declarations(block);
          block.last_line = line_;
          if (!at_end()) advance();  // '}'
          out.push_back(std::move(block));
        }
        prelude_start = pos_;
        prelude_line = 0;
        continue;
      }
      if (prelude_line == 0 && !std::isspace(static_cast<unsigned char>(c))) prelude_line = line_;
      advance();
    }
  }

  static bool is_group_rule(std::string_view prelude) {
    for (std::string_view at : {"@media", "@supports", "@document", "@container", "@layer"}) {
      if (text::starts_with(prelude, at)) return true;
    }
    return false;
  }

  // Consumes up to (not including) the block's closing brace.
  void parse_declarations(RuleBlock& block) {
    std::string current;
    std::uint32_t decl_line = 0;
    int depth = 0;
    auto flush = [&] {
      const auto colon = current.find(':');
      if (colon != std::string::npos) {
        Declaration d;
        d.property = text::to_lower(text::trim(std::string_view(current).substr(0, colon)));
        d.value = std::string(text::trim(std::string_view(current).substr(colon + 1)));
        d.line = decl_line;
        if (!d.property.empty()) block.declarations.push_back(std::move(d));
      }
      current.clear();
      decl_line = 0;
    };
    while (!at_end()) {
      const char c = s_[pos_];
      if (c == '}' && depth == 0) break;
      if (c == '"' || c == '\'') {
        if (decl_line == 0) decl_line = line_;
        const std::size_t start = pos_;
        skip_string();
        current.append(s_.substr(start, pos_ - start));
        continue;
      }
      if (c == '(' || c == '{') ++depth;
      if ((c == ')' || c == '}') && depth > 0) --depth;
      if (c == ';' && depth == 0) {
        flush();
        advance();
        continue;
      }
      if (decl_line == 0 && !std::isspace(static_cast<unsigned char>(c))) decl_line = line_;
      current.push_back(c);
      advance();
    }
    flush();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
};

}  // namespace

const Declaration* RuleBlock::find(std::string_view property) const {
  const std::string wanted = text::to_lower(text::trim(property));
  const Declaration* hit = nullptr;
  for (const auto& d : declarations) {
    if (d.property == wanted) hit = &d;
  }
  return hit;
}

std::vector<RuleBlock> parse_stylesheet(std::string_view stripped) { return Parser(stripped).run(); }

std::string normalize_selector(std::string_view selector) {
  return text::join(text::split_list(text::collapse_whitespace(selector), ','), ", ");
}

std::string normalize_value(std::string_view value) {
  std::string v = text::to_lower(text::collapse_whitespace(value));
  constexpr std::string_view important = "!important";
  if (v.size() >= important.size() && v.compare(v.size() - important.size(), important.size(), important) == 0) {
    v.erase(v.size() - important.size());
    v = std::string(text::trim(v));
  }
  return v;
}

bool selector_matches(std::string_view block_selector, std::string_view wanted) {
  const std::string want = normalize_selector(wanted);
  const std::string have = normalize_selector(block_selector);
  if (have == want) return true;
  if (want.find(',') != std::string::npos) return false;
  for (const auto& part : text::split_list(have, ',')) {
    if (part == want) return true;
  }
  return false;
}

}  // namespace utpada::css
