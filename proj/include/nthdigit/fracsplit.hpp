#pragma once

// Splitting 1/M, with M given only by its coprime prime-power factors, into
// word-sized fractions a_j / q_j whose sum equals 1/M modulo 1.

#include <span>
#include <utility>
#include <vector>

#include "nthdigit/binomfactor.hpp"
#include "nthdigit/modarith.hpp"

namespace nthdigit {

/// a / q with 0 <= a < q.
struct UnitFraction {
  u128 a = 0;
  u128 q = 0;

  friend bool operator==(const UnitFraction&, const UnitFraction&) = default;
};

struct SplitDecomposition {
  std::vector<UnitFraction> entries;  // ascending by prime
};

/// (k1, k2) with k1/a + k2/b == 1/(ab) mod 1, canonical in [0,a) x [0,b).
/// Throws NotCoprime when gcd(a, b) != 1.
std::pair<u128, u128> split_pair(u128 a, u128 b);

/// For each j, prod_{i != j} q_i mod q_j. Moduli must be < 2^96 and >= 2.
/// Odd moduli below 2^31 go through a packed 32-bit Montgomery kernel.
std::vector<u128> cofactor_products(std::span<const u128> moduli);

/// 1/M mod 1 as unit fractions, one per factor, ordered by prime.
/// Throws NotCoprime on a repeated prime.
SplitDecomposition decompose(std::span<const PrimePower> factors);

/// Paper-style pairwise folding: split the first two factors, then fold in
/// one factor at a time, splitting 1/(Q * q) with Q the product so far.
/// Q must stay below 2^96 (ModulusOverflow otherwise).
SplitDecomposition decompose_pairwise(std::span<const PrimePower> factors);

/// Numerator B^d * prod p^f. The sign is carried along for the caller.
struct ScaledNumerator {
  u64 base = 10;
  u64 exponent = 0;
  std::vector<PrimeExponent> numer;
  int sign = 1;
};

/// Residues a_j with sum a_j / q_j == B^d * prod p^f / M (mod 1).
/// Throws NotCoprime when a numerator prime equals a factor prime.
std::vector<UnitFraction> scaled_residues(const ScaledNumerator& mult,
                                          std::span<const PrimePower> factors);

}  // namespace nthdigit
