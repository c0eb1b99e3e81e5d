#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace utpada {

// Path globs over '/'-separated relative paths. `*` matches within one path
// segment, a `**` segment matches zero or more whole segments. Nothing else
// is special.
class Glob {
 public:
  // Returns nullopt with `why` filled for an unusable pattern: empty, absolute,
  // containing a `..` or empty segment, or a `**` not standing alone.
  static std::optional<Glob> compile(std::string_view pattern, std::string* why = nullptr);

  bool matches(std::string_view relative_path) const;
  const std::string& pattern() const noexcept { return pattern_; }

  friend bool operator==(const Glob& a, const Glob& b) { return a.pattern_ == b.pattern_; }

 private:
  explicit Glob(std::string pattern) : pattern_(std::move(pattern)) {}
  std::string pattern_;
};

}  // namespace utpada
