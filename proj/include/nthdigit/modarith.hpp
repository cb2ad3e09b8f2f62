#pragma once

// Word-sized modular arithmetic. Every value here fits in 128 bits; moduli
// are bounded by 2^96 so double-word intermediates never exceed 192 bits.

#include <cstdint>
#include <string>
#include <vector>

namespace nthdigit {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Moduli below this use a single 128-bit product.
inline constexpr u128 kFastModulusLimit = u128(1) << 63;
/// Moduli at or above this are rejected.
inline constexpr u128 kWideModulusLimit = u128(1) << 96;

[[noreturn]] void throw_modulus_overflow(u128 m);

/// Throws ModulusOverflow when m >= 2^96.
inline void check_modulus(u128 m) {
  if (m >= kWideModulusLimit) [[unlikely]] throw_modulus_overflow(m);
}

struct ExtGcdResult {
  u128 g = 0;
  i128 x = 0;
  i128 y = 0;
};

/// a*x + b*y = g = gcd(a, b), with the minimal Bezout pair
/// (|x| <= b/2g, |y| <= a/2g) when both inputs are positive.
/// Inputs must be below 2^126.
ExtGcdResult ext_gcd(u128 a, u128 b);

/// Canonical representative of a signed value in [0, m).
u128 reduce_signed(i128 a, u128 m);

/// Inverse of a modulo m in [0, m). Throws NotCoprime if gcd(a, m) != 1.
u128 mod_inverse(u128 a, u128 m);

/// (a * b) mod m for any m < 2^96. Inputs are reduced first.
u128 mul_mod(u128 a, u128 b, u128 m);

u128 add_mod(u128 a, u128 b, u128 m);

/// b^e mod m by left-to-right square-and-multiply.
u128 pow_mod(u128 b, u128 e, u128 m);

struct Convergent {
  u128 h = 0;  // numerator
  u128 k = 0;  // denominator
};

struct ConvergentList {
  std::vector<Convergent> entries;
  /// Second to last convergent; (1, 0) when the expansion has one entry.
  Convergent before_last{1, 0};
};

/// Continued-fraction convergents of num/den.
ConvergentList convergents(u128 num, u128 den);

/// Inverse of a mod m recovered from the before-last convergent of a/m.
/// Independent of ext_gcd; used to cross-check mod_inverse.
u128 inverse_from_convergents(u128 a, u128 m);

std::string to_string(u128 v);
u128 parse_u128(const std::string& s);

}  // namespace nthdigit
