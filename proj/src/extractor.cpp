#include "nthdigit/extractor.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "nthdigit/binomfactor.hpp"
#include "nthdigit/errors.hpp"

namespace nthdigit {

namespace {

// One base-B digit off the top of a 128-bit fraction; x keeps the remainder.
unsigned next_digit(u128& x, unsigned base) {
  const u128 lo = static_cast<u128>(static_cast<u64>(x)) * base;
  const u128 hi = (x >> 64) * base + (lo >> 64);
  x = (hi << 64) | static_cast<u64>(lo);
  return static_cast<unsigned>(hi >> 64);
}

u128 ceil_to_u128(long double v) {
  if (!(v > 0)) return 0;
  v = std::ceil(v);
  const long double two64 = std::ldexp(1.0L, 64);
  const u128 hi = static_cast<u64>(std::floor(v / two64));
  const u128 lo = static_cast<u64>(v - static_cast<long double>(static_cast<u64>(hi)) * two64);
  return (hi << 64) + lo;
}

struct PartialSum {
  FixedPointFrac acc;
  u64 ulps = 0;
};

PartialSum sum_terms(const SeriesDef& series, u64 first, u64 last, u64 stride, u64 d,
                     unsigned base, std::span<const u64> primes) {
  PartialSum part;
  for (u64 n = first; n <= last; n += stride) {
    const TermContribution t = term_contribution(series, n, d, base, primes);
    if (t.sign > 0) {
      part.acc += t.delta;
    } else {
      part.acc -= t.delta;
    }
    part.ulps += t.ulps;
  }
  return part;
}

void validate(u64 position, unsigned base, const ExtractOptions& opt) {
  if (position < 1) throw std::invalid_argument("position must be >= 1");
  if (base < 2 || base > kMaxBase) throw std::invalid_argument("base must be in [2, 256]");
  if (opt.count < 1 || opt.count > kMaxCount) {
    throw std::invalid_argument("count must be in [1, 32]");
  }
  if (opt.count * std::log2(static_cast<double>(base)) > kFractionBits - 8) {
    throw std::invalid_argument("count * log2(base) must not exceed 120 bits");
  }
  if (opt.guard_bits < 0 || opt.guard_bits > 1000) {
    throw std::invalid_argument("guard bits must be in [0, 1000]");
  }
}

}  // namespace

FixedPointFrac FixedPointFrac::from_fraction(u128 a, u128 q) {
  if (q < 2 || a >= q) throw std::invalid_argument("from_fraction: need 0 <= a < q, q >= 2");
  check_modulus(q);
  u128 out = 0;
  if (q <= 0xffffffffu) {
    const u64 q64 = static_cast<u64>(q);
    u64 r = static_cast<u64>(a);
    for (int i = 0; i < 4; ++i) {
      r <<= 32;
      out = (out << 32) | (r / q64);
      r %= q64;
    }
  } else if (q >> 64 == 0) {
    const u128 num = a << 64;
    const u128 r = num % q;
    out = ((num / q) << 64) | ((r << 64) / q);
  } else {
    u128 r = a;
    for (int i = 0; i < 4; ++i) {
      r <<= 32;
      out = (out << 32) | (r / q);
      r %= q;
    }
  }
  return {out};
}

FixedPointFrac frac_of_rational(i128 p, u128 q, u64 d, unsigned base) {
  if (q == 0) throw std::invalid_argument("frac_of_rational: zero denominator");
  check_modulus(q);
  if (q == 1) return {};
  const u128 r = mul_mod(pow_mod(base, d, q), reduce_signed(p, q), q);
  return FixedPointFrac::from_fraction(r, q);
}

TermContribution term_contribution(const SeriesDef& series, u64 n, u64 d, unsigned base) {
  return term_contribution(series, n, d, base, primes_up_to(2 * n));
}

TermContribution term_contribution(const SeriesDef& series, u64 n, u64 d, unsigned base,
                                   std::span<const u64> primes) {
  const TermFactorization tf = term_factorization(series, n, primes);
  TermContribution out;
  out.sign = tf.sign;
  if (tf.denom.empty()) return out;  // integer term
  const ScaledNumerator mult{base, d, tf.numer, tf.sign};
  for (const UnitFraction& r : scaled_residues(mult, tf.denom)) {
    out.delta += FixedPointFrac::from_fraction(r.a, r.q);
  }
  out.ulps = tf.denom.size();
  return out;
}

DigitRun read_digits(FixedPointFrac acc, unsigned base, unsigned count, u128 total_ulps) {
  DigitRun run;
  u128 x = acc.value;
  for (unsigned i = 0; i < count; ++i) run.values.push_back(next_digit(x, base));

  // An interval that straddles an integer has an ambiguous first digit.
  const u128 lo_v = acc.value - total_ulps;
  const u128 hi_v = acc.value + total_ulps;
  if (acc.value < total_ulps || hi_v < acc.value) return run;
  u128 lo = lo_v, hi = hi_v;
  while (run.confidence < count && next_digit(lo, base) == next_digit(hi, base)) {
    ++run.confidence;
  }
  return run;
}

std::string format_digits(const std::vector<unsigned>& digits, unsigned base) {
  static constexpr char kAlphabet[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (base <= 36) {
      out.push_back(kAlphabet[digits[i]]);
    } else {
      if (i != 0) out.push_back(':');
      out += std::to_string(digits[i]);
    }
  }
  return out;
}

DigitResult extract_digits(std::string_view constant, u64 position, unsigned base,
                           const ExtractOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  validate(position, base, options);
  const SeriesDef& series = lookup(constant);
  const u64 shift = position - 1;

  const double log2_base = std::log2(static_cast<double>(base));
  const double log2_scale = std::log2(std::fabs(static_cast<double>(series.u))) -
                            std::log2(static_cast<double>(series.w));
  const int guard = options.guard_bits + static_cast<int>(std::ceil(std::max(0.0, log2_scale)));
  const u64 terms = tail_cutoff(series, position + options.count, base, guard);
  const long double tail_log2 = static_cast<long double>(tail_log_bound(series, terms)) +
                                static_cast<long double>(shift) * log2_base + log2_scale +
                                kFractionBits;
  const u128 tail_ulps = ceil_to_u128(std::exp2(tail_log2)) + 1;

  const std::vector<u64> primes = primes_up_to(2 * terms + 2);

  PartialSum total;
  if (series.v != 0) {
    total.acc = frac_of_rational(series.v, static_cast<u128>(series.w), shift, base);
    total.ulps = 1;
  }

  const u64 workers = std::max<u64>(1, std::min<u64>(options.threads, terms));
  if (workers == 1) {
    const PartialSum p = sum_terms(series, 1, terms, 1, shift, base, primes);
    total.acc += p.acc;
    total.ulps += p.ulps;
  } else {
    std::vector<PartialSum> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (u64 t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        try {
          parts[t] = sum_terms(series, t + 1, terms, workers, shift, base, primes);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (u64 t = 0; t < workers; ++t) {
      if (errors[t]) std::rethrow_exception(errors[t]);
      total.acc += parts[t].acc;
      total.ulps += parts[t].ulps;
    }
  }

  DigitResult result;
  result.constant = series.constant;
  result.series = series.name;
  result.integer_part = series.integer_part;
  result.base = base;
  result.position = position;
  result.error_bound_ulps = total.ulps;
  result.tail_bound_ulps = tail_ulps;
  result.terms_used = terms;
  result.guard_bits = options.guard_bits;
  result.accumulator = total.acc;
  const DigitRun run = read_digits(total.acc, base, options.count, total.ulps + tail_ulps);
  result.digit_values = run.values;
  result.digits = format_digits(run.values, base);
  result.confidence = run.confidence;
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace nthdigit
