#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "nthdigit/fracsplit.hpp"
#include "nthdigit/modarith.hpp"
#include "nthdigit/series.hpp"

namespace nthdigit {

inline constexpr int kFractionBits = 128;
inline constexpr int kDefaultGuardBits = 40;
inline constexpr unsigned kMaxBase = 256;
inline constexpr unsigned kMaxCount = 32;

/// A value in [0, 1) as value / 2^128. Addition and subtraction wrap, which
/// is exactly arithmetic modulo 1.
struct FixedPointFrac {
  u128 value = 0;

  /// floor(a / q * 2^128) for 0 <= a < q < 2^96.
  static FixedPointFrac from_fraction(u128 a, u128 q);

  FixedPointFrac& operator+=(FixedPointFrac o) {
    value += o.value;
    return *this;
  }
  FixedPointFrac& operator-=(FixedPointFrac o) {
    value -= o.value;
    return *this;
  }
  friend FixedPointFrac operator+(FixedPointFrac a, FixedPointFrac b) { return a += b; }
  friend FixedPointFrac operator-(FixedPointFrac a, FixedPointFrac b) { return a -= b; }
  friend bool operator==(FixedPointFrac, FixedPointFrac) = default;
};

/// floor(frac(B^d * p / q) * 2^128), error below one ulp. q < 2^96.
FixedPointFrac frac_of_rational(i128 p, u128 q, u64 d, unsigned base);

struct TermContribution {
  FixedPointFrac delta;  // frac(B^d * |u * term_n / w|)
  int sign = 1;
  u64 ulps = 0;          // rounding budget consumed, one per residue
};

TermContribution term_contribution(const SeriesDef& series, u64 n, u64 d, unsigned base);

/// Same, reusing a prime table that covers 2n.
TermContribution term_contribution(const SeriesDef& series, u64 n, u64 d, unsigned base,
                                   std::span<const u64> primes);

struct DigitRun {
  std::vector<unsigned> values;
  unsigned confidence = 0;
};

/// Leading digits of acc in base B; confidence is the length of the prefix
/// shared by acc - ulps and acc + ulps (both wrapping modulo 1).
DigitRun read_digits(FixedPointFrac acc, unsigned base, unsigned count, u128 total_ulps);

/// Digits as text: 0-9A-Z for bases up to 36, otherwise decimal values
/// joined with ':'.
std::string format_digits(const std::vector<unsigned>& digits, unsigned base);

struct ExtractOptions {
  unsigned count = 1;
  int guard_bits = kDefaultGuardBits;
  unsigned threads = 1;
};

struct DigitResult {
  std::string constant;
  std::string series;
  std::string integer_part;
  unsigned base = 10;
  u64 position = 1;
  std::string digits;
  std::vector<unsigned> digit_values;
  unsigned confidence = 0;
  u128 error_bound_ulps = 0;  // accumulated rounding, units of 2^-128
  u128 tail_bound_ulps = 0;   // dropped series tail, units of 2^-128
  u64 terms_used = 0;
  int guard_bits = kDefaultGuardBits;
  FixedPointFrac accumulator;  // frac(B^(position-1) * constant), approximately
  std::chrono::nanoseconds elapsed{0};
};

/// Digits position .. position+count-1 (1-based, fractional) of a constant,
/// computed without its earlier digits and with word-sized arithmetic only.
/// Throws UnknownConstant, ModulusOverflow, std::invalid_argument.
DigitResult extract_digits(std::string_view constant, u64 position, unsigned base,
                           const ExtractOptions& options = {});

}  // namespace nthdigit
