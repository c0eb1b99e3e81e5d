#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace utpada {

namespace detail {
__extension__ typedef __int128 Wide;
}  // namespace detail

// Exact fraction with a positive, reduced denominator. Scores and rates are
// kept exact so that threshold comparisons (the 6.5 pass mark, the 0.9 pass
// rate) never depend on floating point rounding.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT
  Rational(std::int64_t num, std::int64_t den);

  // Accepts "12", "-3", "32.5", "0.125" and "3/4".
  static Rational parse(std::string_view text);
  static std::optional<Rational> try_parse(std::string_view text);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept;
  std::int64_t floor() const noexcept;

  // Rounds half away from zero for positives (half-up) to `places` decimals.
  Rational round_half_up(int places) const;

  // Fixed-point rendering; exact values print without trailing zeros beyond
  // `min_places`.
  std::string to_decimal(int max_places = 6, int min_places = 0) const;

  Rational operator-() const { return Rational(-num_, den_); }
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(detail::Wide num, detail::Wide den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational clamp(const Rational& v, const Rational& lo, const Rational& hi);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace utpada
