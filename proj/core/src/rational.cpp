#include "utpada/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace utpada {
namespace {

detail::Wide gcd128(detail::Wide a, detail::Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    detail::Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

detail::Wide pow10(int n) {
  detail::Wide p = 1;
  for (int i = 0; i < n; ++i) p *= 10;
  return p;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  *this = from_wide(num, den);
}

Rational Rational::from_wide(detail::Wide num, detail::Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const detail::Wide g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr auto lo = std::numeric_limits<std::int64_t>::min();
  constexpr auto hi = std::numeric_limits<std::int64_t>::max();
  if (num < lo || num > hi || den > hi) {
    throw std::overflow_error("rational overflow");
  }
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

std::optional<Rational> Rational::try_parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto n = try_parse(text.substr(0, slash));
    auto d = try_parse(text.substr(slash + 1));
    if (!n || !d || n->den() != 1 || d->den() != 1 || d->num() == 0) return std::nullopt;
    return Rational(n->num(), d->num());
  }

  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty() || text.size() > 30) return std::nullopt;

  detail::Wide num = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (seen_dot) ++frac_digits;
  }
  if (!seen_digit) return std::nullopt;
  try {
    return from_wide(negative ? -num : num, pow10(frac_digits));
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

Rational Rational::parse(std::string_view text) {
  auto r = try_parse(text);
  if (!r) throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return *r;
}

double Rational::to_double() const noexcept {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::int64_t Rational::floor() const noexcept {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

Rational Rational::round_half_up(int places) const {
  const detail::Wide scale = pow10(places);
  // floor(x * scale + 1/2) / scale
  const detail::Wide n = static_cast<detail::Wide>(num_) * scale * 2 + den_;
  const detail::Wide d = static_cast<detail::Wide>(den_) * 2;
  detail::Wide q = n / d;
  if (n % d != 0 && n < 0) --q;
  return from_wide(q, scale);
}

std::string Rational::to_decimal(int max_places, int min_places) const {
  const Rational r = round_half_up(max_places);
  const detail::Wide scale = pow10(max_places);
  detail::Wide scaled = static_cast<detail::Wide>(r.num_) * scale / r.den_;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;

  std::string digits;
  do {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  } while (scaled != 0);
  while (static_cast<int>(digits.size()) <= max_places) digits.insert(digits.begin(), '0');

  std::string int_part = digits.substr(0, digits.size() - max_places);
  std::string frac_part = digits.substr(digits.size() - max_places);
  while (static_cast<int>(frac_part.size()) > min_places && !frac_part.empty() &&
         frac_part.back() == '0') {
    frac_part.pop_back();
  }
  std::string out = negative ? "-" : "";
  out += int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<detail::Wide>(a.num_) * b.den_ +
                                 static_cast<detail::Wide>(b.num_) * a.den_,
                             static_cast<detail::Wide>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<detail::Wide>(a.num_) * b.num_,
                             static_cast<detail::Wide>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<detail::Wide>(a.num_) * b.den_,
                             static_cast<detail::Wide>(a.den_) * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const detail::Wide l = static_cast<detail::Wide>(a.num_) * b.den_;
  const detail::Wide r = static_cast<detail::Wide>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational clamp(const Rational& v, const Rational& lo, const Rational& hi) {
  if (v < lo) return lo;
  if (hi < v) return hi;
  return v;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_decimal();
}

}  // namespace utpada
