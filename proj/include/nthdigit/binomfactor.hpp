#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nthdigit/modarith.hpp"
#include "nthdigit/series.hpp"

namespace nthdigit {

/// p^e with its value; q < 2^96.
struct PrimePower {
  u64 p = 0;
  unsigned e = 0;
  u128 q = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A numerator prime with an exponent that may be far too large to
/// materialize (2^n for the c = 2 series). Only ever used through pow_mod.
struct PrimeExponent {
  u64 p = 0;
  u64 e = 0;

  friend bool operator==(const PrimeExponent&, const PrimeExponent&) = default;
};

/// Exact reduced form of u * term_n / w: sign * prod(numer) / prod(denom).
/// Both lists are sorted by prime and share no prime.
struct TermFactorization {
  u64 n = 0;
  int sign = 1;
  std::vector<PrimePower> denom;
  std::vector<PrimeExponent> numer;
};

/// Incremental segmented sieve. Holds the base primes up to sqrt(limit)
/// and one fixed-size segment, never a table of all primes up to limit.
class PrimeStream {
 public:
  explicit PrimeStream(u64 limit);

  /// Next prime <= limit, or nullopt when exhausted.
  std::optional<u64> next();

 private:
  void fill_segment();

  u64 limit_;
  std::vector<u64> base_primes_;
  std::vector<bool> composite_;
  u64 segment_lo_ = 0;
  std::size_t cursor_ = 0;
  bool done_ = false;
};

/// All primes <= limit, collected from a PrimeStream.
std::vector<u64> primes_up_to(u64 limit);

/// Exponent of p in C(2n, n): sum_k floor(2n/p^k) - 2 floor(n/p^k).
unsigned binomial_valuation(u64 p, u64 n);

/// Largest e with p^e | n.
unsigned integer_valuation(u64 p, u64 n);

/// Prime-power factorization of C(2n, n), never forming C(2n, n) itself.
std::vector<PrimePower> factor_central_binomial(u64 n);

/// Reduced factorization of u * term_n / w for a registry series.
/// Throws ModulusOverflow when a denominator prime power reaches 2^96.
TermFactorization term_factorization(const SeriesDef& series, u64 n);

/// Same, reusing a caller-held ascending prime table that covers 2n.
TermFactorization term_factorization(const SeriesDef& series, u64 n,
                                     std::span<const u64> primes);

}  // namespace nthdigit
