/*
 * Copyright 2026 The ANDOR Bench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ANDOR_DECIMAL_HPP
#define ANDOR_DECIMAL_HPP

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include "andor/common.hpp"

namespace andor {

// Exact decimal stored as an integer count of millionths. Domain values
// and positive sets compare exactly, so set membership never depends on
// floating-point rounding.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1'000'000;
  static constexpr int kDigits = 6;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }

  // Parses "-0.333", "1", "0.5" ... with at most six fractional digits.
  static Decimal parse(std::string_view text) {
    std::string_view s = text;
    require(!s.empty(), "empty decimal");
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
      negative = s.front() == '-';
      s.remove_prefix(1);
    }
    std::int64_t whole = 0;
    std::int64_t frac = 0;
    int frac_digits = 0;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : s) {
      if (c == '.') {
        require(!seen_dot, "malformed decimal '" + std::string(text) + "'");
        seen_dot = true;
      } else if (c >= '0' && c <= '9') {
        seen_digit = true;
        if (seen_dot) {
          require(frac_digits < kDigits,
                  "decimal '" + std::string(text) +
                      "' has more than six fractional digits");
          frac = frac * 10 + (c - '0');
          ++frac_digits;
        } else {
          whole = whole * 10 + (c - '0');
          require(whole < 1'000'000'000'000LL,
                  "decimal '" + std::string(text) + "' out of range");
        }
      } else {
        throw ValidationError("malformed decimal '" + std::string(text) + "'");
      }
    }
    require(seen_digit, "malformed decimal '" + std::string(text) + "'");
    for (int i = frac_digits; i < kDigits; ++i) frac *= 10;
    std::int64_t units = whole * kScale + frac;
    return from_units(negative ? -units : units);
  }

  // Nearest decimal to a double (used when reading JSON numbers).
  static Decimal from_double(double value) {
    double scaled = value * static_cast<double>(kScale);
    return from_units(static_cast<std::int64_t>(
        scaled < 0 ? scaled - 0.5 : scaled + 0.5));
  }

  constexpr std::int64_t units() const { return units_; }
  constexpr double to_double() const {
    return static_cast<double>(units_) / static_cast<double>(kScale);
  }

  // Canonical text: no trailing zeros, no trailing dot, "-0" never emitted.
  std::string to_string() const {
    std::int64_t magnitude = units_ < 0 ? -units_ : units_;
    std::string out = units_ < 0 ? "-" : "";
    out += std::to_string(magnitude / kScale);
    std::int64_t frac = magnitude % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, static_cast<std::size_t>(kDigits) - digits.size(), '0');
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += "." + digits;
    }
    return out;
  }

  constexpr auto operator<=>(const Decimal&) const = default;

 private:
  std::int64_t units_ = 0;
};

}  // namespace andor

#endif  // ANDOR_DECIMAL_HPP
