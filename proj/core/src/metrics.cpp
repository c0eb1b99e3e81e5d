#include "utpada/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "utpada/error.hpp"

namespace utpada {
namespace {

enum class BlockKind { Class, Function, Plain };

const std::set<std::string, std::less<>> kClassKeywords{"class", "interface", "object", "struct", "enum"};
const std::set<std::string, std::less<>> kFunctionKeywords{"fun", "function"};
const std::set<std::string, std::less<>> kControlKeywords{
    "if",     "else", "for", "while",   "do",    "switch", "when",   "try",   "catch",
    "finally", "synchronized", "return", "throw", "new",   "with",   "foreach", "using",
    "lock",   "case", "default", "typeof", "await", "yield", "in",     "is",    "as",
    "var",    "val",  "let", "const"};
const std::set<std::string, std::less<>> kDecisionWords{"if", "for", "while", "catch", "case"};
const std::set<std::string, std::less<>> kTerminators{"return", "throw", "break", "continue"};
const std::set<std::string, std::less<>> kControlHeads{"if", "while", "for", "switch", "when", "catch"};

bool is_punct(const Token* t, char c) {
  return t && t->kind == TokenKind::Punct && t->text.size() == 1 && t->text[0] == c;
}
bool is_word(const Token* t) { return t && t->kind == TokenKind::Word; }
bool is_word(const Token* t, std::string_view w) { return is_word(t) && t->text == w; }

// Punctuation after which a line break does not end a statement.
bool continues_statement(const Token* prev) {
  if (!prev) return false;
  if (prev->kind == TokenKind::Punct) {
    static const std::string_view cont = "=+-*/%&|!?:,.([<>^~";
    return cont.find(prev->text[0]) != std::string_view::npos;
  }
  return is_word(prev, "else") || is_word(prev, "do");
}

// Tokens that can begin a statement; everything else continues one.
bool can_begin_statement(const Token* t) {
  if (t->kind != TokenKind::Punct) return true;
  static const std::string_view starters = "{}([-!@";
  return starters.find(t->text[0]) != std::string_view::npos;
}

struct Header {
  std::vector<const Token*> tokens;
};

std::string class_name_of(const Header& h) {
  std::size_t last_kw = h.tokens.size();
  for (std::size_t i = 0; i < h.tokens.size(); ++i) {
    if (is_word(h.tokens[i]) && kClassKeywords.count(h.tokens[i]->text)) last_kw = i;
  }
  if (last_kw + 1 < h.tokens.size() && is_word(h.tokens[last_kw + 1])) return h.tokens[last_kw + 1]->text;
  for (const Token* t : h.tokens) {
    if (is_word(t, "companion")) return "Companion";
  }
  return "<anonymous>";
}

BlockKind classify(const Header& h, std::string* function_name) {
  const auto& tk = h.tokens;
  for (const Token* t : tk) {
    if (is_word(t) && kClassKeywords.count(t->text)) return BlockKind::Class;
  }
  auto first_paren = std::find_if(tk.begin(), tk.end(), [](const Token* t) { return is_punct(t, '('); });
  auto name_before_paren = [&](std::vector<const Token*>::const_iterator from) {
    std::string name = "<anonymous>";
    for (auto it = from; it != tk.end() && !is_punct(*it, '('); ++it) {
      if (is_word(*it) && !kFunctionKeywords.count((*it)->text)) name = (*it)->text;
    }
    return name;
  };

  for (auto it = tk.begin(); it != tk.end(); ++it) {
    if (is_word(*it) && kFunctionKeywords.count((*it)->text)) {
      *function_name = first_paren == tk.end() ? "<anonymous>" : name_before_paren(it + 1);
      return BlockKind::Function;
    }
  }
  if (tk.size() >= 2 && is_punct(tk[tk.size() - 2], '=') && is_punct(tk.back(), '>') && !tk.back()->space_before) {
    *function_name = "<anonymous>";
    return BlockKind::Function;
  }

  const Token* first_word = nullptr;
  for (const Token* t : tk) {
    if (t->kind != TokenKind::Punct) {
      first_word = t;
      break;
    }
  }
  if (!first_word || (first_word->kind == TokenKind::Word && kControlKeywords.count(first_word->text)) ||
      first_paren == tk.end()) {
    return BlockKind::Plain;
  }
  auto last_close = std::find_if(tk.rbegin(), tk.rend(), [](const Token* t) { return is_punct(t, ')'); });
  if (last_close == tk.rend()) return BlockKind::Plain;

  bool word_before = false;
  for (auto it = tk.begin(); it != first_paren; ++it) {
    const Token* t = *it;
    if (t->kind != TokenKind::Punct) {
      word_before = true;
      continue;
    }
    if (std::string_view("@<>,?[]").find(t->text[0]) == std::string_view::npos) return BlockKind::Plain;
  }
  if (!word_before) return BlockKind::Plain;

  auto tail_begin = last_close.base();  // one past the last ')'
  if (tail_begin != tk.end() && !is_word(*tail_begin, "throws")) {
    for (auto it = tail_begin; it != tk.end(); ++it) {
      const Token* t = *it;
      if (t->kind != TokenKind::Punct) continue;
      if (std::string_view(":<>,?[]").find(t->text[0]) == std::string_view::npos) return BlockKind::Plain;
    }
  }
  *function_name = name_before_paren(tk.begin());
  return BlockKind::Function;
}

enum class DeadState { None, InTerminator, Dead };

struct Frame {
  BlockKind kind = BlockKind::Plain;
  std::string class_name;  // qualified name for class frames, enclosing class otherwise
  int function_index = -1;
  int depth = 0;  // depth within the enclosing function, 0 outside functions
  bool is_when = false;
  std::uint32_t open_line = 0;
  int paren = 0;
  DeadState dead = DeadState::None;
  LineSpan dead_span;
};

class StructureScanner {
 public:
  explicit StructureScanner(const SourceFile& file) : file_(file), tokens_(file.tokens) {}

  StructureMetrics run() {
    for (std::size_t i = 0; i < tokens_.size(); ++i) step(i);
    if (!frames_.empty()) {
      throw Error(ErrorKind::UnbalancedBraces,
                  file_.path + ":" + std::to_string(frames_.back().open_line) + ": unclosed '{'", file_.path);
    }
    finish();
    return std::move(out_);
  }

 private:
  Frame* top() { return frames_.empty() ? nullptr : &frames_.back(); }

  bool statement_start(const Token* t) const {
    const Frame* f = frames_.empty() ? nullptr : &frames_.back();
    if (f && f->paren > 0) return false;
    if (t->literal_tail || !can_begin_statement(t)) return false;
    if (!prev_) return true;
    if (is_punct(prev_, '{') || is_punct(prev_, ';')) return true;
    if (is_punct(prev_, '}')) return t->line > prev_->line || t->kind != TokenKind::Punct;
    return t->line > prev_->line && !after_control_ && !continues_statement(prev_);
  }

  void count_decision(std::size_t i) {
    Frame* f = top();
    if (!f || f->function_index < 0) return;
    const Token* t = &tokens_[i];
    const Token* next = i + 1 < tokens_.size() ? &tokens_[i + 1] : nullptr;
    int& complexity = out_.functions[static_cast<std::size_t>(f->function_index)].complexity;
    if (t->kind == TokenKind::Word) {
      if (kDecisionWords.count(t->text)) ++complexity;
      return;
    }
    if (t->kind != TokenKind::Punct) return;
    const char c = t->text[0];
    if ((c == '&' || c == '|') && is_punct(next, c) && !next->space_before) {
      ++complexity;
      skip_next_ = true;
    } else if (c == '?' && t->space_before && next &&
               !((is_punct(next, '.') || is_punct(next, ':') || is_punct(next, '?')) && !next->space_before)) {
      ++complexity;
    } else if (c == '-' && f->is_when && is_punct(next, '>') && !next->space_before && !is_word(prev_, "else")) {
      ++complexity;
    }
  }

  void open_block(const Token& t) {
    std::string fname;
    const BlockKind kind = classify(header_, &fname);
    Frame* parent = top();
    Frame f;
    f.kind = kind;
    f.open_line = t.line;
    const std::string enclosing_class = parent ? parent->class_name : std::string(kTopLevelClass);
    f.class_name = enclosing_class;
    f.is_when = std::any_of(header_.tokens.begin(), header_.tokens.end(),
                            [](const Token* h) { return is_word(h, "when"); });

    if (kind == BlockKind::Function) {
      FunctionMetrics fm;
      fm.name = fname;
      fm.class_name = enclosing_class;
      fm.span = {t.line, t.line};
      out_.functions.push_back(fm);
      f.function_index = static_cast<int>(out_.functions.size() - 1);
      f.depth = 1;
    } else {
      f.function_index = parent ? parent->function_index : -1;
      f.depth = (parent && parent->depth > 0) ? parent->depth + 1 : 0;
      if (kind == BlockKind::Class) {
        const std::string name = class_name_of(header_);
        f.class_name = (parent && parent->class_name != kTopLevelClass) ? parent->class_name + "." + name : name;
        if (class_loc_.emplace(f.class_name, 0).second) class_order_.push_back(f.class_name);
      }
    }
    if (f.function_index >= 0 && f.depth > 0) {
      auto& fm = out_.functions[static_cast<std::size_t>(f.function_index)];
      fm.max_depth = std::max(fm.max_depth, f.depth);
    }
    any_block_ = true;
    frames_.push_back(std::move(f));
  }

  void close_block(const Token& t) {
    if (frames_.empty()) {
      throw Error(ErrorKind::UnbalancedBraces, file_.path + ":" + std::to_string(t.line) + ": unmatched '}'", file_.path);
    }
    Frame f = std::move(frames_.back());
    frames_.pop_back();
    if (f.dead == DeadState::Dead) out_.dead_code.push_back(f.dead_span);
    if (f.kind == BlockKind::Function) {
      out_.functions[static_cast<std::size_t>(f.function_index)].span.last = t.line;
    } else if (f.kind == BlockKind::Class) {
      class_loc_[f.class_name] += count_loc(f.open_line, t.line);
    }
    // Tokens after this brace extend a dead region in the enclosing frame.
    if (Frame* p = top(); p && p->dead == DeadState::Dead) p->dead_span.last = t.line;
  }

  void track_dead(const Token& t, bool at_start) {
    Frame* f = top();
    if (!f) return;
    if (f->dead == DeadState::Dead) {
      if (at_start && (is_word(&t, "case") || is_word(&t, "default"))) {
        out_.dead_code.push_back(f->dead_span);
        f->dead = DeadState::None;
      } else {
        f->dead_span.last = std::max(f->dead_span.last, t.line);
        return;
      }
    }
    if (f->dead == DeadState::InTerminator && at_start) {
      if (is_word(&t, "case") || is_word(&t, "default")) {
        f->dead = DeadState::None;
      } else {
        f->dead = DeadState::Dead;
        f->dead_span = {t.line, t.line};
        return;
      }
    }
    if (at_start && t.kind == TokenKind::Word && kTerminators.count(t.text) && f->kind != BlockKind::Class) {
      f->dead = DeadState::InTerminator;
    }
  }

  void step(std::size_t i) {
    const Token& t = tokens_[i];
    if (skip_next_) {
      skip_next_ = false;
      prev_ = &t;
      return;
    }
    const bool brace_open = is_punct(&t, '{');
    const bool brace_close = is_punct(&t, '}');
    const bool at_start = !brace_close && statement_start(&t);

    if (brace_close) {
      if (Frame* f = top(); f && f->dead == DeadState::InTerminator) f->dead = DeadState::None;
      close_block(t);
      header_.tokens.clear();
      after_control_ = false;
      prev_ = &t;
      return;
    }

    track_dead(t, at_start);
    if (at_start && !brace_open) header_.tokens.clear();

    if (brace_open) {
      open_block(t);
      header_.tokens.clear();
      after_control_ = false;
      prev_ = &t;
      return;
    }

    if (t.kind != TokenKind::Text) count_decision(i);

    Frame* f = top();
    bool next_after_control = false;
    if (is_punct(&t, '(') || is_punct(&t, '[')) {
      if (f) ++f->paren;
      control_parens_.push_back(is_punct(&t, '(') && is_word(prev_) && kControlHeads.count(prev_->text) > 0);
    } else if (is_punct(&t, ')') || is_punct(&t, ']')) {
      if (f && f->paren > 0) --f->paren;
      if (!control_parens_.empty()) {
        next_after_control = control_parens_.back();
        control_parens_.pop_back();
      }
    }
    after_control_ = next_after_control;

    if (is_punct(&t, ';') && (!f || f->paren == 0)) {
      header_.tokens.clear();
    } else {
      header_.tokens.push_back(&t);
    }
    prev_ = &t;
  }

  int count_loc(std::uint32_t first, std::uint32_t last) const {
    int n = 0;
    for (std::uint32_t l = first; l <= last && l <= file_.lines.size(); ++l) {
      if (!file_.lines[l - 1].empty()) ++n;
    }
    return n;
  }

  void finish() {
    for (const auto& fm : out_.functions) out_.max_depth = std::max(out_.max_depth, fm.max_depth);
    if (any_block_) out_.max_depth = std::max(out_.max_depth, 1);

    for (const auto& name : class_order_) {
      ClassRow row;
      row.name = name;
      row.loc = class_loc_[name];
      out_.classes.push_back(row);
    }
    bool toplevel = false;
    ClassRow top_row;
    top_row.name = std::string(kTopLevelClass);
    for (const auto& fm : out_.functions) {
      ClassRow* row = nullptr;
      if (fm.class_name == kTopLevelClass) {
        toplevel = true;
        row = &top_row;
        row->loc += count_loc(fm.span.first, fm.span.last);
      } else {
        for (auto& r : out_.classes) {
          if (r.name == fm.class_name) row = &r;
        }
      }
      if (!row) continue;
      ++row->methods;
      row->wmc += fm.complexity;
    }
    if (toplevel) out_.classes.push_back(top_row);
    std::sort(out_.dead_code.begin(), out_.dead_code.end());
  }

  const SourceFile& file_;
  const std::vector<Token>& tokens_;
  StructureMetrics out_;
  std::vector<Frame> frames_;
  Header header_;
  const Token* prev_ = nullptr;
  bool after_control_ = false;
  bool skip_next_ = false;
  bool any_block_ = false;
  std::vector<bool> control_parens_;
  std::vector<std::string> class_order_;
  std::map<std::string, int> class_loc_;
};

}  // namespace

StructureMetrics analyze_structure(const SourceFile& file) {
  if (!is_brace_language(file.language)) {
    throw std::invalid_argument(file.path + ": structure metrics need a brace-delimited language");
  }
  return StructureScanner(file).run();
}

NestingDepth nested_block_depth(const SourceFile& file) {
  auto s = analyze_structure(file);
  return {std::move(s.functions), s.max_depth};
}

std::vector<ClassRow> wmc(const SourceFile& file) { return analyze_structure(file).classes; }

std::vector<LineSpan> dead_code(const SourceFile& file) { return analyze_structure(file).dead_code; }

Rational wacc(std::span<const ClassRow> rows) {
  Rational weighted = 0;
  std::int64_t total_loc = 0;
  for (const auto& r : rows) {
    weighted += Rational(r.wmc) * Rational(r.loc);
    total_loc += r.loc;
  }
  if (rows.empty() || total_loc <= 0) throw Error(ErrorKind::NoClasses, "no class rows with lines of code");
  return weighted / Rational(total_loc);
}

CodeQualityMetrics code_quality(const SourceTree& tree) {
  CodeQualityMetrics out;
  std::vector<ClassRow> all_rows;
  for (const auto& f : tree.files) {
    FileQuality q;
    q.path = f.path;
    q.loc = static_cast<int>(std::count_if(f.lines.begin(), f.lines.end(), [](const std::string& l) { return !l.empty(); }));
    if (!is_brace_language(f.language)) {
      q.note = "not a brace-delimited language";
    } else {
      try {
        q.structure = analyze_structure(f);
        out.max_nested_block_depth = std::max(out.max_nested_block_depth, q.structure->max_depth);
        for (const auto& r : q.structure->classes) all_rows.push_back(r);
      } catch (const Error& e) {
        q.note = e.what();
      }
    }
    out.files.push_back(std::move(q));
  }
  try {
    out.wacc = wacc(all_rows);
  } catch (const Error&) {
    out.wacc.reset();
  }
  return out;
}

}  // namespace utpada
