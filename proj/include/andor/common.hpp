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

#ifndef ANDOR_COMMON_HPP
#define ANDOR_COMMON_HPP

#include <bit>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace andor {

// Process exit codes used by the command line tool.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIntegrity = 3,
  kBudget = 4,
};

class Error : public std::runtime_error {
 public:
  Error(const std::string& what, ExitCode code)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Malformed configuration, inputs out of domain, shape mismatches.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(what, ExitCode::kValidation) {}
};

// Content hash mismatch, missing or tampered artifacts.
class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what)
      : Error(what, ExitCode::kIntegrity) {}
};

// An exhaustive computation would exceed its configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::uint64_t required)
      : Error(what, ExitCode::kBudget), required_(required) {}
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

// Training diverged (non-finite loss).
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int epoch)
      : Error(what, ExitCode::kValidation), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

// Set of sample positions, backed by a 64-bit mask. Sample lengths are
// bounded by 64 because every exhaustive computation in the toolkit is
// exponential in the length anyway.
class PositionSet {
 public:
  static constexpr int kMaxPositions = 64;

  constexpr PositionSet() = default;
  constexpr explicit PositionSet(std::uint64_t bits) : bits_(bits) {}

  static PositionSet from_positions(const std::vector<int>& positions) {
    PositionSet s;
    for (int p : positions) s.insert(p);
    return s;
  }
  static constexpr PositionSet range(int begin, int count) {
    PositionSet s;
    for (int p = begin; p < begin + count; ++p) s.insert(p);
    return s;
  }

  constexpr void insert(int p) { bits_ |= (std::uint64_t{1} << p); }
  constexpr void erase(int p) { bits_ &= ~(std::uint64_t{1} << p); }
  constexpr bool contains(int p) const {
    return (bits_ >> p) & std::uint64_t{1};
  }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint64_t bits() const { return bits_; }

  constexpr bool is_subset_of(PositionSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr bool intersects(PositionSet other) const {
    return (bits_ & other.bits_) != 0;
  }
  constexpr PositionSet operator|(PositionSet o) const {
    return PositionSet(bits_ | o.bits_);
  }
  constexpr PositionSet operator&(PositionSet o) const {
    return PositionSet(bits_ & o.bits_);
  }
  constexpr bool operator==(const PositionSet&) const = default;

  std::vector<int> positions() const {
    std::vector<int> out;
    out.reserve(size());
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(std::countr_zero(b));
    }
    return out;
  }

 private:
  std::uint64_t bits_ = 0;
};

// Orders position sets by cardinality, then lexicographically over their
// sorted member lists.
inline bool canonical_less(PositionSet a, PositionSet b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a.positions() < b.positions();
}

// Lexicographic order over sorted member lists only.
inline bool lexicographic_less(PositionSet a, PositionSet b) {
  return a.positions() < b.positions();
}

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent seed for a named sub-stream.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851F42D4C957F2DULL));
}

inline std::uint64_t derive(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return derive(seed, h);
}

// The standard distributions are implementation-defined; these helpers
// keep every stream bit-identical across standard libraries.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

inline std::size_t below(std::mt19937_64& gen, std::size_t n) {
  return static_cast<std::size_t>(gen() % n);
}

template <typename T>
void shuffle(std::vector<T>& values, std::mt19937_64& gen) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[below(gen, i)]);
  }
}

}  // namespace rng

// Shortest-free fixed format used for every serialized score: 17
// significant digits round-trips any finite double.
inline std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace andor

#endif  // ANDOR_COMMON_HPP
