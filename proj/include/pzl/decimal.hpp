#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pzl {

// Exact fixed-point decimal: value = units / 10^digits, digits in [0, 4].
// Used wherever a ground truth is an exact sum; never stored as binary
// floating point.
struct Decimal {
  std::int64_t units = 0;
  int digits = 0;

  Decimal() = default;
  Decimal(std::int64_t u, int d) : units(u), digits(d) {
    if (d < 0 || d > 4) throw std::invalid_argument("decimal digits out of range");
  }

  static std::int64_t pow10(int d) {
    std::int64_t p = 1;
    for (int i = 0; i < d; ++i) p *= 10;
    return p;
  }

  Decimal rescaled(int d) const {
    if (d < digits) throw std::invalid_argument("decimal rescale would lose precision");
    return Decimal(units * pow10(d - digits), d);
  }

  Decimal operator+(const Decimal& o) const {
    const int d = digits > o.digits ? digits : o.digits;
    return Decimal(rescaled(d).units + o.rescaled(d).units, d);
  }

  Decimal operator-(const Decimal& o) const {
    const int d = digits > o.digits ? digits : o.digits;
    return Decimal(rescaled(d).units - o.rescaled(d).units, d);
  }

  bool operator==(const Decimal& o) const {
    const int d = digits > o.digits ? digits : o.digits;
    return rescaled(d).units == o.rescaled(d).units;
  }
  bool operator!=(const Decimal& o) const { return !(*this == o); }
  bool operator<(const Decimal& o) const {
    const int d = digits > o.digits ? digits : o.digits;
    return rescaled(d).units < o.rescaled(d).units;
  }

  double to_double() const { return static_cast<double>(units) / static_cast<double>(pow10(digits)); }

  // Canonical rendering at the decimal's own scale: "45", "-3.50", "0.2".
  std::string to_string() const {
    const std::int64_t p = pow10(digits);
    const bool neg = units < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(units + 1)) + 1
                                  : static_cast<std::uint64_t>(units);
    std::uint64_t ip = mag / static_cast<std::uint64_t>(p);
    std::uint64_t fp = mag % static_cast<std::uint64_t>(p);
    std::string s = neg ? "-" : "";
    s += std::to_string(ip);
    if (digits > 0) {
      std::string frac = std::to_string(fp);
      s += '.';
      s += std::string(static_cast<std::size_t>(digits) - frac.size(), '0');
      s += frac;
    }
    return s;
  }

  // Parses "[+-]digits[.digits]"; rejects anything else.
  static Decimal parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty decimal");
    std::size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
      neg = text[i] == '-';
      ++i;
    }
    std::int64_t units = 0;
    int digits = 0;
    bool any = false, frac = false;
    for (; i < text.size(); ++i) {
      const char c = text[i];
      if (c == '.') {
        if (frac) throw std::invalid_argument("malformed decimal: " + text);
        frac = true;
        continue;
      }
      if (c < '0' || c > '9') throw std::invalid_argument("malformed decimal: " + text);
      if (frac && digits >= 4) throw std::invalid_argument("too many decimal places: " + text);
      units = units * 10 + (c - '0');
      if (frac) ++digits;
      any = true;
    }
    if (!any) throw std::invalid_argument("malformed decimal: " + text);
    return Decimal(neg ? -units : units, digits);
  }
};

}  // namespace pzl
