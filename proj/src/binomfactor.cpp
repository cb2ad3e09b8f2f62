#include "nthdigit/binomfactor.hpp"

#include <algorithm>
#include <stdexcept>

#include "nthdigit/errors.hpp"

namespace nthdigit {

namespace {

constexpr u64 kSegmentSize = 1u << 15;

u64 isqrt(u64 x) {
  u64 r = 0;
  for (u64 bit = u64(1) << 31; bit != 0; bit >>= 1) {
    const u64 cand = r | bit;
    if (cand * cand <= x) r = cand;
  }
  return r;
}

// Small trial factorization for the affine coefficients and |c|.
void append_prime_factors(u64 x, std::vector<u64>& out) {
  for (u64 p = 2; p * p <= x; ++p) {
    if (x % p == 0) {
      out.push_back(p);
      while (x % p == 0) x /= p;
    }
  }
  if (x > 1) out.push_back(x);
}

u64 abs64(std::int64_t v) {
  return v < 0 ? static_cast<u64>(-(v + 1)) + 1 : static_cast<u64>(v);
}

}  // namespace

PrimeStream::PrimeStream(u64 limit) : limit_(limit) {
  const u64 root = isqrt(limit);
  std::vector<bool> small(root + 1, true);
  for (u64 i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base_primes_.push_back(i);
    for (u64 j = i * i; j <= root; j += i) small[j] = false;
  }
  segment_lo_ = 2;
  if (limit_ < 2) {
    done_ = true;
  } else {
    fill_segment();
  }
}

void PrimeStream::fill_segment() {
  const u64 hi = std::min(limit_, segment_lo_ + kSegmentSize - 1);
  composite_.assign(hi - segment_lo_ + 1, false);
  for (u64 p : base_primes_) {
    if (p * p > hi) break;
    u64 start = std::max(p * p, (segment_lo_ + p - 1) / p * p);
    for (u64 j = start; j <= hi; j += p) composite_[j - segment_lo_] = true;
  }
  cursor_ = 0;
}

std::optional<u64> PrimeStream::next() {
  while (!done_) {
    while (cursor_ < composite_.size()) {
      const std::size_t i = cursor_++;
      if (!composite_[i]) return segment_lo_ + i;
    }
    const u64 next_lo = segment_lo_ + composite_.size();
    if (next_lo > limit_) {
      done_ = true;
      break;
    }
    segment_lo_ = next_lo;
    fill_segment();
  }
  return std::nullopt;
}

std::vector<u64> primes_up_to(u64 limit) {
  std::vector<u64> out;
  PrimeStream stream(limit);
  while (auto p = stream.next()) out.push_back(*p);
  return out;
}

unsigned binomial_valuation(u64 p, u64 n) {
  const u64 two_n = 2 * n;
  unsigned e = 0;
  u64 pk = p;
  while (pk <= two_n) {
    e += static_cast<unsigned>(two_n / pk - 2 * (n / pk));
    if (pk > two_n / p) break;  // next power would exceed 2n (or overflow)
    pk *= p;
  }
  return e;
}

unsigned integer_valuation(u64 p, u64 n) {
  unsigned e = 0;
  while (n != 0 && n % p == 0) {
    n /= p;
    ++e;
  }
  return e;
}

std::vector<PrimePower> factor_central_binomial(u64 n) {
  std::vector<PrimePower> out;
  PrimeStream stream(2 * n);
  while (auto p = stream.next()) {
    const unsigned e = binomial_valuation(*p, n);
    if (e == 0) continue;
    u128 q = 1;
    for (unsigned i = 0; i < e; ++i) q *= *p;  // p^e <= 2n by Kummer
    out.push_back({*p, e, q});
  }
  return out;
}

TermFactorization term_factorization(const SeriesDef& series, u64 n) {
  return term_factorization(series, n, primes_up_to(2 * n));
}

TermFactorization term_factorization(const SeriesDef& series, u64 n,
                                     std::span<const u64> primes) {
  if (n == 0) throw std::invalid_argument("term_factorization: n must be >= 1");
  const u64 abs_u = abs64(series.u);
  const u64 w = abs64(series.w);
  const u64 abs_c = static_cast<u64>(series.abs_c());

  TermFactorization out;
  out.n = n;
  out.sign = series.term_sign(n) * (series.u < 0 ? -1 : 1);

  auto account = [&](u64 p) {
    std::int64_t e = binomial_valuation(p, n);
    e += static_cast<std::int64_t>(series.s) * integer_valuation(p, n);
    e += integer_valuation(p, w);
    e -= static_cast<std::int64_t>(n) * integer_valuation(p, abs_c);
    e -= integer_valuation(p, abs_u);
    if (e > 0) {
      u128 q = 1;
      for (std::int64_t i = 0; i < e; ++i) {
        q *= p;
        if (q >= kWideModulusLimit) {
          throw ModulusOverflow("term " + std::to_string(n) + " of " + series.name +
                                ": " + std::to_string(p) + "^" + std::to_string(e) +
                                " is not below 2^96");
        }
      }
      out.denom.push_back({p, static_cast<unsigned>(e), q});
    } else if (e < 0) {
      out.numer.push_back({p, static_cast<u64>(-e)});
    }
  };

  const u64 two_n = 2 * n;
  for (u64 p : primes) {
    if (p > two_n) break;
    account(p);
  }
  // Primes of u, w, |c| beyond 2n (only possible for tiny n).
  std::vector<u64> extra;
  append_prime_factors(abs_u, extra);
  append_prime_factors(w, extra);
  append_prime_factors(abs_c, extra);
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
  for (u64 p : extra) {
    if (p > two_n) account(p);
  }
  auto by_prime = [](const auto& a, const auto& b) { return a.p < b.p; };
  std::sort(out.denom.begin(), out.denom.end(), by_prime);
  std::sort(out.numer.begin(), out.numer.end(), by_prime);
  return out;
}

}  // namespace nthdigit
