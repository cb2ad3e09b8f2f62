#pragma once

// Arbitrary-precision reference values. This is the only part of the
// project that links GMP; the extraction path never includes this header.

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

#include "nthdigit/binomfactor.hpp"
#include "nthdigit/series.hpp"

namespace nthdigit::oracle {

mpz_class central_binomial(u64 n);

/// w(n) |c|^n / (n^s C(2n,n)) exactly, before the affine map.
mpq_class exact_term(const SeriesDef& series, u64 n);

/// sign * prod(numer) / prod(denom) of a factorization.
mpq_class factorization_value(const TermFactorization& tf);

struct ReferenceDigits {
  std::string constant;
  std::string series;
  unsigned base = 10;
  std::string integer_part;
  std::string fractional;               // formatted, see format_digits
  std::vector<unsigned> fractional_values;
  u64 precision_terms = 0;
  unsigned guard_digits = 0;
};

/// First `digits` fractional digits of a registry constant, exact. The sum is
/// bracketed by exact integer bounds and the guard grows until both ends of
/// the bracket agree on every requested digit.
ReferenceDigits reference_digits(std::string_view constant, u64 digits, unsigned base);

/// The d-th hexadecimal fractional digit of pi (1-based) by the
/// Bailey-Borwein-Plouffe series with word-sized modular powers.
unsigned bbp_hex_pi(u64 d);

struct Mismatch {
  u64 position = 0;
  unsigned expected = 0;
  unsigned actual = 0;
};

struct VerifyReport {
  std::string constant;
  unsigned base = 10;
  u64 from = 1;
  u64 to = 1;
  std::vector<Mismatch> mismatches;
  unsigned min_confidence = 0;
  u64 checked = 0;
};

/// Runs extract_digits at every position in [from, to] (one digit each) and
/// compares with reference_digits.
VerifyReport verify_range(std::string_view constant, u64 from, u64 to, unsigned base,
                          int guard_bits = 40, unsigned threads = 1);

/// `<constant> <base> <integer_part>.<fractional>`
std::string fixture_line(const ReferenceDigits& ref);

/// Inverse of fixture_line. Throws std::invalid_argument on malformed input.
ReferenceDigits parse_fixture_line(std::string_view line);

}  // namespace nthdigit::oracle
