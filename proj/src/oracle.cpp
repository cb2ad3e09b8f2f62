#include "nthdigit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nthdigit/extractor.hpp"
#include "nthdigit/modarith.hpp"

namespace nthdigit::oracle {

namespace {

mpz_class to_mpz(u128 v) {
  mpz_class hi(static_cast<unsigned long>(static_cast<u64>(v >> 64)));
  mpz_class lo(static_cast<unsigned long>(static_cast<u64>(v)));
  return (hi << 64) + lo;
}

mpz_class pow_ui(unsigned long base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

// Exactly `count` base-B digits of 0 <= v < B^count, most significant first.
std::vector<unsigned> digit_values(const mpz_class& v, u64 count, unsigned base) {
  std::vector<unsigned> out(count, 0);
  if (base <= 36) {
    const std::string s = v.get_str(static_cast<int>(base));
    if (s.size() > count) throw std::logic_error("digit_values: value too large");
    const std::size_t pad = count - s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char ch = s[i];
      out[pad + i] = static_cast<unsigned>(ch <= '9' ? ch - '0' : ch - 'a' + 10);
    }
    return out;
  }
  mpz_class x = v;
  for (u64 i = count; i-- > 0;) {
    out[i] = static_cast<unsigned>(mpz_fdiv_q_ui(x.get_mpz_t(), x.get_mpz_t(), base));
  }
  return out;
}

// floor(a / q * 2^128) for a < q < 2^64.
u128 to_fixed(u128 a, u128 q) {
  u128 out = 0;
  for (int i = 0; i < 4; ++i) {
    a <<= 32;
    out = (out << 32) | (a / q);
    a %= q;
  }
  return out;
}

// frac(16^(d-1) * sum_k 16^-k / (8k + j)) in 128-bit fixed point.
u128 bbp_sum(u64 d, u64 j) {
  u128 acc = 0;
  for (u64 k = 0; k < d; ++k) {
    const u128 q = 8 * static_cast<u128>(k) + j;
    const u128 r = pow_mod(16, d - 1 - k, q);
    if (q > 1) acc += to_fixed(r, q);
  }
  for (u64 m = 1; m < 32; ++m) {
    const u128 q = 8 * static_cast<u128>(d - 1 + m) + j;
    acc += to_fixed(1, q) >> (4 * m);
  }
  return acc;
}

}  // namespace

mpz_class central_binomial(u64 n) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), 2 * n, n);
  return r;
}

mpq_class exact_term(const SeriesDef& series, u64 n) {
  mpz_class num = pow_ui(static_cast<unsigned long>(series.abs_c()), n);
  mpz_class den = central_binomial(n);
  const mpz_class nn(static_cast<unsigned long>(n));
  for (int i = 0; i < series.s; ++i) den *= nn;
  for (int i = 0; i > series.s; --i) num *= nn;
  if (series.term_sign(n) < 0) num = -num;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

mpq_class factorization_value(const TermFactorization& tf) {
  mpz_class num = 1, den = 1;
  for (const auto& pe : tf.numer) num *= pow_ui(pe.p, pe.e);
  for (const auto& pp : tf.denom) den *= to_mpz(pp.q);
  if (tf.sign < 0) num = -num;
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

ReferenceDigits reference_digits(std::string_view constant, u64 digits, unsigned base) {
  if (base < 2 || base > kMaxBase) throw std::invalid_argument("base must be in [2, 256]");
  const SeriesDef& series = lookup(constant);
  const double log2_base = std::log2(static_cast<double>(base));

  // Bracket width is about 2 (N + 1) |u| units of the last working digit.
  const u64 n_estimate = tail_cutoff(series, digits + 15, base, 20);
  const double spread = std::log2(2.0 * (n_estimate + 2) * std::fabs(double(series.u)));
  unsigned guard = 10 + static_cast<unsigned>(std::ceil(spread / log2_base));

  const mpz_class u(static_cast<long>(series.u));
  const mpz_class v(static_cast<long>(series.v));
  const mpz_class w(static_cast<long>(series.w));

  for (int attempt = 0; attempt < 8; ++attempt, guard += 8) {
    const u64 precision = digits + guard;
    const mpz_class scale = pow_ui(base, precision);
    const u64 terms = tail_cutoff(series, precision, base, 20);

    // sum of sign * floor(scale * |term_n|); each floor is off by less than 1
    // and the dropped tail is below 2^-20 units.
    mpz_class sum = 0;
    mpz_class binom = 1;
    mpz_class cpow = scale;
    for (u64 n = 1; n <= terms; ++n) {
      binom = binom * (2 * (2 * n - 1)) / n;  // exact: C(2n,n) = C(2n-2,n-1) 2(2n-1)/n
      cpow *= static_cast<unsigned long>(series.abs_c());
      mpz_class num = cpow;
      mpz_class den = binom;
      const mpz_class nn(static_cast<unsigned long>(n));
      for (int i = 0; i < series.s; ++i) den *= nn;
      for (int i = 0; i > series.s; --i) num *= nn;
      const mpz_class t = floor_div(num, den);
      if (series.term_sign(n) > 0) {
        sum += t;
      } else {
        sum -= t;
      }
    }
    const mpz_class slack(static_cast<unsigned long>(terms + 1));
    mpz_class lo = u * (sum - slack) + v * scale;
    mpz_class hi = u * (sum + slack) + v * scale;
    if (series.u < 0) std::swap(lo, hi);
    const mpz_class unit = w * pow_ui(base, guard);
    const mpz_class y_lo = floor_div(lo, unit);
    const mpz_class y_hi = floor_div(hi, unit);
    if (y_lo != y_hi) continue;

    const mpz_class frac_scale = pow_ui(base, digits);
    const mpz_class int_part = floor_div(y_lo, frac_scale);
    const mpz_class frac_part = y_lo - int_part * frac_scale;

    ReferenceDigits out;
    out.constant = series.constant;
    out.series = series.name;
    out.base = base;
    std::vector<unsigned> int_digits;
    if (int_part == 0) {
      int_digits.push_back(0);
    } else {
      std::size_t len = 0;
      for (mpz_class t = int_part; t > 0; t /= base) ++len;
      int_digits = digit_values(int_part, len, base);
    }
    out.integer_part = format_digits(int_digits, base);
    out.fractional_values = digit_values(frac_part, digits, base);
    out.fractional = format_digits(out.fractional_values, base);
    out.precision_terms = terms;
    out.guard_digits = guard;
    return out;
  }
  throw std::runtime_error("reference_digits: could not certify digits (long carry run)");
}

unsigned bbp_hex_pi(u64 d) {
  if (d < 1) throw std::invalid_argument("bbp_hex_pi: position must be >= 1");
  const u128 x = 4 * bbp_sum(d, 1) - 2 * bbp_sum(d, 4) - bbp_sum(d, 5) - bbp_sum(d, 6);
  return static_cast<unsigned>(x >> 124);
}

VerifyReport verify_range(std::string_view constant, u64 from, u64 to, unsigned base,
                          int guard_bits, unsigned threads) {
  if (from < 1 || from > to) throw std::invalid_argument("verify_range: need 1 <= from <= to");
  const ReferenceDigits ref = reference_digits(constant, to, base);
  VerifyReport report;
  report.constant = ref.constant;
  report.base = base;
  report.from = from;
  report.to = to;
  report.min_confidence = 1;
  for (u64 d = from; d <= to; ++d) {
    const DigitResult r = extract_digits(constant, d, base, {1, guard_bits, threads});
    const unsigned expected = ref.fractional_values[d - 1];
    if (r.digit_values[0] != expected) {
      report.mismatches.push_back({d, expected, r.digit_values[0]});
    }
    report.min_confidence = std::min(report.min_confidence, r.confidence);
    ++report.checked;
  }
  return report;
}

std::string fixture_line(const ReferenceDigits& ref) {
  std::ostringstream out;
  out << ref.constant << ' ' << ref.base << ' ' << ref.integer_part << '.' << ref.fractional;
  return out.str();
}

ReferenceDigits parse_fixture_line(std::string_view line) {
  std::istringstream in{std::string(line)};
  ReferenceDigits ref;
  std::string number;
  if (!(in >> ref.constant >> ref.base >> number)) {
    throw std::invalid_argument("fixture line must be '<constant> <base> <int>.<frac>'");
  }
  const auto dot = number.find('.');
  if (dot == std::string::npos || ref.base < 2 || ref.base > 36) {
    throw std::invalid_argument("malformed fixture number: " + number);
  }
  ref.integer_part = number.substr(0, dot);
  ref.fractional = number.substr(dot + 1);
  for (char ch : ref.fractional) {
    unsigned v = 0;
    if (ch >= '0' && ch <= '9') {
      v = static_cast<unsigned>(ch - '0');
    } else if (ch >= 'A' && ch <= 'Z') {
      v = static_cast<unsigned>(ch - 'A' + 10);
    } else {
      throw std::invalid_argument(std::string("bad fixture digit: ") + ch);
    }
    if (v >= ref.base) throw std::invalid_argument("fixture digit exceeds base");
    ref.fractional_values.push_back(v);
  }
  return ref;
}

}  // namespace nthdigit::oracle
