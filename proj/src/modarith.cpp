#include "nthdigit/modarith.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "nthdigit/errors.hpp"

namespace nthdigit {

void throw_modulus_overflow(u128 m) {
  throw ModulusOverflow("modulus " + to_string(m) + " is not below 2^96");
}

ExtGcdResult ext_gcd(u128 a, u128 b) {
  i128 old_r = static_cast<i128>(a), r = static_cast<i128>(b);
  i128 old_s = 1, s = 0;
  i128 old_t = 0, t = 1;
  while (r != 0) {
    const i128 q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  return {static_cast<u128>(old_r), old_s, old_t};
}

u128 reduce_signed(i128 a, u128 m) {
  if (a >= 0) return static_cast<u128>(a) % m;
  const u128 r = static_cast<u128>(-(a + 1)) % m;  // -(a+1) avoids overflow at min
  return m - 1 - r;
}

namespace {

// Word-sized Euclid for the common case m < 2^63.
std::int64_t inverse_coefficient_64(std::int64_t a, std::int64_t m, std::int64_t& g) {
  std::int64_t old_r = a, r = m, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
  }
  g = old_r;
  return old_s;
}

}  // namespace

u128 mod_inverse(u128 a, u128 m) {
  if (m < 2) throw std::invalid_argument("mod_inverse: modulus must be >= 2");
  a %= m;
  u128 g = 0;
  i128 x = 0;
  if (m < kFastModulusLimit) {
    std::int64_t g64 = 0;
    x = inverse_coefficient_64(static_cast<std::int64_t>(a), static_cast<std::int64_t>(m), g64);
    g = static_cast<u128>(g64);
  } else {
    const ExtGcdResult r = ext_gcd(a, m);
    g = r.g;
    x = r.x;
  }
  if (g != 1) {
    throw NotCoprime("mod_inverse: gcd(" + to_string(a) + ", " + to_string(m) +
                     ") = " + to_string(g));
  }
  return reduce_signed(x, m);
}

u128 add_mod(u128 a, u128 b, u128 m) {
  // a, b < m < 2^96, so the sum cannot wrap.
  const u128 s = a + b;
  return s >= m ? s - m : s;
}

namespace {

// a * b mod m for m in [2^63, 2^96): Horner over the three 32-bit limbs of b.
u128 mul_mod_wide(u128 a, u128 b, u128 m) {
  constexpr u128 kLimbMask = 0xffffffffu;
  u128 r = 0;
  for (int shift = 64; shift >= 0; shift -= 32) {
    const u128 limb = (b >> shift) & kLimbMask;
    r = (r << 32) % m;
    r = add_mod(r, (a * limb) % m, m);
  }
  return r;
}

}  // namespace

u128 mul_mod(u128 a, u128 b, u128 m) {
  check_modulus(m);
  a %= m;
  b %= m;
  if (m <= 0xffffffffu) return static_cast<u64>(a) * static_cast<u64>(b) % static_cast<u64>(m);
  if (m < kFastModulusLimit) return (a * b) % m;
  return mul_mod_wide(a, b, m);
}

u128 pow_mod(u128 b, u128 e, u128 m) {
  check_modulus(m);
  if (m == 1) return 0;
  b %= m;
  if (m <= 0xffffffffu) {
    const u64 m64 = static_cast<u64>(m);
    u64 base = static_cast<u64>(b), result = 1;
    while (e != 0) {
      if (e & 1) result = result * base % m64;
      e >>= 1;
      if (e != 0) base = base * base % m64;
    }
    return result;
  }
  u128 result = 1;
  while (e != 0) {
    if (e & 1) result = mul_mod(result, b, m);
    e >>= 1;
    if (e != 0) b = mul_mod(b, b, m);
  }
  return result;
}

ConvergentList convergents(u128 num, u128 den) {
  if (den == 0) throw std::invalid_argument("convergents: zero denominator");
  ConvergentList out;
  Convergent prev{1, 0};
  Convergent prev2{0, 1};
  while (den != 0) {
    const u128 q = num / den;
    const Convergent cur{q * prev.h + prev2.h, q * prev.k + prev2.k};
    out.entries.push_back(cur);
    prev2 = prev;
    prev = cur;
    num = std::exchange(den, num - q * den);
  }
  out.before_last = prev2;
  return out;
}

u128 inverse_from_convergents(u128 a, u128 m) {
  if (m < 2) throw std::invalid_argument("inverse_from_convergents: modulus must be >= 2");
  a %= m;
  const ConvergentList cl = convergents(a, m);
  if (cl.entries.back().k != m) {
    throw NotCoprime("inverse_from_convergents: " + to_string(a) + " and " + to_string(m) +
                     " share a factor");
  }
  // h_n k_{n-1} - h_{n-1} k_n = (-1)^(n-1) with h_n = a, k_n = m.
  const std::size_t n = cl.entries.size() - 1;
  const u128 k = cl.before_last.k % m;
  if (n % 2 == 1) return k;
  return k == 0 ? 0 : m - k;
}

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

u128 parse_u128(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("parse_u128: empty string");
  u128 v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("parse_u128: not a number: " + s);
    const u128 next = v * 10 + static_cast<u128>(ch - '0');
    if (next / 10 != v) throw std::out_of_range("parse_u128: overflow: " + s);
    v = next;
  }
  return v;
}

}  // namespace nthdigit
