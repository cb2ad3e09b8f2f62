#include "nthdigit/fracsplit.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>

#include "nthdigit/errors.hpp"

namespace nthdigit {

namespace {

using u32 = std::uint32_t;

constexpr u128 kMontLimit = u128(1) << 31;
constexpr u128 kPackLimit = u128(1) << 32;

// -m^{-1} mod 2^32 for odd m, by Newton iteration.
u32 neg_inverse_32(u32 m) {
  u32 inv = m;  // correct to 3 bits
  for (int i = 0; i < 4; ++i) inv *= 2 - m * inv;
  return 0u - inv;
}

// Montgomery reduction with R = 2^32: T * R^{-1} mod m for T < m * 2^32, m < 2^31.
inline u32 redc(std::uint64_t T, u32 m, u32 minv) {
  const u32 t = static_cast<u32>(T) * minv;
  const std::uint64_t r = (T + static_cast<std::uint64_t>(t) * m) >> 32;
  return static_cast<u32>(r >= m ? r - m : r);
}

// acc[l] <- acc[l] * f * R^{-1} mod m[l] over a lane range.
void mont_apply(u32* __restrict acc, const u32* __restrict m, const u32* __restrict minv,
                std::size_t lo, std::size_t hi, u32 f) {
  for (std::size_t l = lo; l < hi; ++l) {
    acc[l] = redc(static_cast<std::uint64_t>(acc[l]) * f, m[l], minv[l]);
  }
}

struct Pack {
  std::size_t begin = 0;
  std::size_t end = 0;
  u128 value = 1;
  bool packed = false;  // value < 2^32, usable as a Montgomery factor
};

std::vector<Pack> build_packs(std::span<const u128> q) {
  std::vector<Pack> packs;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < kPackLimit) {
      if (!packs.empty() && packs.back().packed && packs.back().end == i &&
          packs.back().value * q[i] < kPackLimit) {
        packs.back().value *= q[i];
        packs.back().end = i + 1;
        continue;
      }
      packs.push_back({i, i + 1, q[i], true});
    } else {
      packs.push_back({i, i + 1, q[i], false});
    }
  }
  return packs;
}

u128 product_excluding(std::span<const u128> q, std::size_t j, u128 m) {
  const bool pow2 = (m & (m - 1)) == 0;
  u128 acc = 1 % m;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i == j) continue;
    if (pow2 && m <= (u128(1) << 64)) {
      acc = (acc * (q[i] & (m - 1))) & (m - 1);
    } else {
      acc = mul_mod(acc, q[i], m);
    }
  }
  return acc;
}

void check_factor_list(std::span<const PrimePower> factors) {
  std::vector<u64> primes;
  primes.reserve(factors.size());
  for (const auto& f : factors) {
    if (f.q < 2) throw std::invalid_argument("factor value must be >= 2");
    check_modulus(f.q);
    primes.push_back(f.p);
  }
  std::sort(primes.begin(), primes.end());
  const auto dup = std::adjacent_find(primes.begin(), primes.end());
  if (dup != primes.end()) {
    throw NotCoprime("prime " + std::to_string(*dup) + " appears in more than one factor");
  }
}

std::vector<u128> factor_values(std::span<const PrimePower> factors) {
  std::vector<u128> q;
  q.reserve(factors.size());
  for (const auto& f : factors) q.push_back(f.q);
  return q;
}

// Entries reordered by ascending prime.
std::vector<UnitFraction> order_by_prime(std::span<const PrimePower> factors,
                                         std::vector<UnitFraction> entries) {
  std::vector<std::size_t> order(factors.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return factors[a].p < factors[b].p; });
  std::vector<UnitFraction> out;
  out.reserve(entries.size());
  for (std::size_t i : order) out.push_back(entries[i]);
  return out;
}

}  // namespace

std::pair<u128, u128> split_pair(u128 a, u128 b) {
  if (a < 2 || b < 2) throw std::invalid_argument("split_pair: moduli must be >= 2");
  const ExtGcdResult r = ext_gcd(a, b);
  if (r.g != 1) {
    throw NotCoprime("split_pair: gcd(" + to_string(a) + ", " + to_string(b) +
                     ") = " + to_string(r.g));
  }
  // a*x + b*y = 1  =>  1/(ab) = y/a + x/b.
  return {reduce_signed(r.y, a), reduce_signed(r.x, b)};
}

namespace {

// Cofactor products with the Montgomery lanes left in raw form:
// acc[l] = prod_{i != j} q_i * R^{-steps} mod m[l], j = lane_factor[l].
struct CofactorState {
  std::vector<std::size_t> lane_factor;
  std::vector<u32> m, minv, acc;
  u128 steps = 0;
  std::vector<u128> plain;  // exact products for factors that are not lanes
  std::vector<bool> is_lane;
};

CofactorState cofactor_state(std::span<const u128> q) {
  for (u128 m : q) {
    if (m < 2) throw std::invalid_argument("cofactor_products: modulus must be >= 2");
    check_modulus(m);
  }
  CofactorState st;
  st.plain.assign(q.size(), 0);
  st.is_lane.assign(q.size(), false);
  const std::vector<Pack> packs = build_packs(q);

  // Lanes in factor order so each pack owns a contiguous lane range.
  std::vector<std::size_t> lane_pack;
  std::vector<std::size_t> pack_lo(packs.size()), pack_hi(packs.size());
  for (std::size_t g = 0; g < packs.size(); ++g) {
    pack_lo[g] = st.lane_factor.size();
    for (std::size_t j = packs[g].begin; j < packs[g].end; ++j) {
      if (q[j] < kMontLimit && (q[j] & 1) == 1) {
        st.lane_factor.push_back(j);
        st.m.push_back(static_cast<u32>(q[j]));
        st.minv.push_back(neg_inverse_32(static_cast<u32>(q[j])));
        st.is_lane[j] = true;
        lane_pack.push_back(g);
      } else {
        st.plain[j] = product_excluding(q, j, q[j]);
      }
    }
    pack_hi[g] = st.lane_factor.size();
  }
  st.steps = packs.size();

  const std::size_t lanes = st.lane_factor.size();
  st.acc.assign(lanes, 1);
  if (lanes == 0) return st;
  u32* a = st.acc.data();
  const u32* m = st.m.data();
  const u32* minv = st.minv.data();

  for (std::size_t g = 0; g < packs.size(); ++g) {
    if (packs[g].packed) {
      const u32 f = static_cast<u32>(packs[g].value);
      mont_apply(a, m, minv, 0, pack_lo[g], f);
      mont_apply(a, m, minv, pack_hi[g], lanes, f);
    } else {
      // Factor wider than 32 bits: reduce per lane first. Never a lane itself.
      for (std::size_t l = 0; l < lanes; ++l) {
        const u32 f = static_cast<u32>(packs[g].value % m[l]);
        a[l] = redc(static_cast<std::uint64_t>(a[l]) * f, m[l], minv[l]);
      }
    }
  }
  // Own pack: multiply by the other members, so every lane takes `steps` reductions.
  for (std::size_t l = 0; l < lanes; ++l) {
    const Pack& pk = packs[lane_pack[l]];
    u128 partner = 1;
    for (std::size_t i = pk.begin; i < pk.end; ++i) {
      if (i != st.lane_factor[l]) partner *= q[i];
    }
    a[l] = redc(static_cast<std::uint64_t>(a[l]) * static_cast<u32>(partner), m[l], minv[l]);
  }
  return st;
}

// Montgomery arithmetic over a batch of lanes, R = 2^32. Loops run across
// lanes with a uniform instruction stream so the compiler can vectorize.
class MontBatch {
 public:
  MontBatch(const std::vector<u32>& m, const std::vector<u32>& minv)
      : m_(m), minv_(minv), size_(m.size()), one_(size_), r2_(size_) {
    for (std::size_t l = 0; l < size_; ++l) {
      const std::uint64_t r = (std::uint64_t(1) << 32) % m_[l];
      one_[l] = static_cast<u32>(r);
      r2_[l] = static_cast<u32>(r * r % m_[l]);
    }
  }

  std::size_t size() const { return size_; }

  // x (plain, each < 2^32) to Montgomery form, in place.
  void to_mont(std::vector<u32>& x) const {
    for (std::size_t l = 0; l < size_; ++l) {
      x[l] = redc(static_cast<std::uint64_t>(x[l]) * r2_[l], m_[l], minv_[l]);
    }
  }

  void mul(std::vector<u32>& x, const std::vector<u32>& y) const {
    u32* __restrict xp = x.data();
    const u32* __restrict yp = y.data();
    const u32* __restrict m = m_.data();
    const u32* __restrict minv = minv_.data();
    for (std::size_t l = 0; l < size_; ++l) {
      xp[l] = redc(static_cast<std::uint64_t>(xp[l]) * yp[l], m[l], minv[l]);
    }
  }

  // base^e for a shared exponent; base and result in Montgomery form.
  std::vector<u32> pow(const std::vector<u32>& base, u128 e) const {
    std::vector<u32> out = one_;
    if (e == 0) return out;
    int top = 127;
    while (((e >> top) & 1) == 0) --top;
    for (int bit = top; bit >= 0; --bit) {
      mul(out, out);
      if ((e >> bit) & 1) mul(out, base);
    }
    return out;
  }

  // base^e[l] with per-lane exponents below 2^32.
  std::vector<u32> pow_each(const std::vector<u32>& base, const std::vector<u32>& e) const {
    std::vector<u32> out = one_;
    u32* __restrict op = out.data();
    const u32* __restrict bp = base.data();
    const u32* __restrict ep = e.data();
    const u32* __restrict m = m_.data();
    const u32* __restrict minv = minv_.data();
    u32 all_bits = 0;
    for (std::size_t l = 0; l < size_; ++l) all_bits |= ep[l];
    const int top = all_bits == 0 ? -1 : 31 - std::countl_zero(all_bits);
    for (int bit = top; bit >= 0; --bit) {
      for (std::size_t l = 0; l < size_; ++l) {
        const u32 sq = redc(static_cast<std::uint64_t>(op[l]) * op[l], m[l], minv[l]);
        const u32 pr = redc(static_cast<std::uint64_t>(sq) * bp[l], m[l], minv[l]);
        op[l] = ((ep[l] >> bit) & 1) ? pr : sq;
      }
    }
    return out;
  }

  // Out of Montgomery form.
  std::vector<u32> from_mont(std::vector<u32> x) const {
    for (std::size_t l = 0; l < size_; ++l) x[l] = redc(x[l], m_[l], minv_[l]);
    return x;
  }

  // Plain value v reduced into each lane, in Montgomery form.
  std::vector<u32> constant(u128 v) const {
    std::vector<u32> x(size_);
    for (std::size_t l = 0; l < size_; ++l) x[l] = static_cast<u32>(v % m_[l]);
    to_mont(x);
    return x;
  }

 private:
  const std::vector<u32>& m_;
  const std::vector<u32>& minv_;
  std::size_t size_;
  std::vector<u32> one_;  // R mod m
  std::vector<u32> r2_;   // R^2 mod m
};

// Residues a_j = B^d * small * prod(large p^f) / (M / q_j) mod q_j.
std::vector<u128> residues(std::span<const PrimePower> factors, u64 base, u64 exponent,
                           u128 small, std::span<const PrimeExponent> large) {
  const std::vector<u128> q = factor_values(factors);
  const CofactorState st = cofactor_state(q);
  std::vector<u128> out(q.size(), 0);

  for (std::size_t j = 0; j < q.size(); ++j) {
    if (st.is_lane[j]) continue;
    u128 a = pow_mod(base, exponent, q[j]);
    a = mul_mod(a, small, q[j]);
    for (const auto& np : large) a = mul_mod(a, pow_mod(np.p, np.e, q[j]), q[j]);
    out[j] = mul_mod(a, mod_inverse(st.plain[j], q[j]), q[j]);
  }

  const std::size_t lanes = st.lane_factor.size();
  if (lanes == 0) return out;
  const MontBatch mb(st.m, st.minv);

  std::vector<u32> x = mb.pow(mb.constant(base), exponent);
  if (small != 1) mb.mul(x, mb.constant(small));
  for (const auto& np : large) mb.mul(x, mb.pow(mb.constant(np.p), np.e));

  // Raw acc read as a Montgomery representative is z = prod * R^{-steps-1};
  // z^(phi - 1) = z^{-1} by Euler, then R^{-(steps+1)} fixes the scale.
  std::vector<u32> phi_minus_1(lanes);
  for (std::size_t l = 0; l < lanes; ++l) {
    const PrimePower& f = factors[st.lane_factor[l]];
    const u64 qv = static_cast<u64>(f.q);
    phi_minus_1[l] = static_cast<u32>(qv - qv / f.p - 1);
  }
  std::vector<u32> inv = mb.pow_each(st.acc, phi_minus_1);
  mb.mul(inv, mb.pow(std::vector<u32>(lanes, 1), st.steps + 1));
  mb.mul(x, inv);
  const std::vector<u32> plain = mb.from_mont(std::move(x));
  for (std::size_t l = 0; l < lanes; ++l) out[st.lane_factor[l]] = plain[l];
  return out;
}

}  // namespace

std::vector<u128> cofactor_products(std::span<const u128> q) {
  const CofactorState st = cofactor_state(q);
  std::vector<u128> out = st.plain;
  for (std::size_t l = 0; l < st.lane_factor.size(); ++l) {
    const u128 ml = st.m[l];
    const u128 r_pow = pow_mod((u128(1) << 32) % ml, st.steps, ml);
    out[st.lane_factor[l]] = mul_mod(st.acc[l], r_pow, ml);
  }
  return out;
}

SplitDecomposition decompose(std::span<const PrimePower> factors) {
  check_factor_list(factors);
  const std::vector<u128> a = residues(factors, 1, 0, 1, {});
  std::vector<UnitFraction> entries;
  entries.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) entries.push_back({a[j], factors[j].q});
  return {order_by_prime(factors, std::move(entries))};
}

SplitDecomposition decompose_pairwise(std::span<const PrimePower> factors) {
  check_factor_list(factors);
  std::vector<UnitFraction> entries;
  if (factors.empty()) return {};
  entries.push_back({1 % factors[0].q, factors[0].q});
  u128 product = factors[0].q;
  for (std::size_t i = 1; i < factors.size(); ++i) {
    const u128 qi = factors[i].q;
    const auto [k1, k2] = split_pair(product, qi);
    for (auto& e : entries) e.a = mul_mod(e.a, k1, e.q);
    entries.push_back({k2, qi});
    if (product > (kWideModulusLimit - 1) / qi) {
      if (i + 1 < factors.size()) {
        throw ModulusOverflow("decompose_pairwise: running product is not below 2^96");
      }
    } else {
      product *= qi;
    }
  }
  return {order_by_prime(factors, std::move(entries))};
}

std::vector<UnitFraction> scaled_residues(const ScaledNumerator& mult,
                                          std::span<const PrimePower> factors) {
  check_factor_list(factors);
  for (const auto& np : mult.numer) {
    for (const auto& f : factors) {
      if (f.p == np.p) {
        throw NotCoprime("scaled_residues: numerator prime " + std::to_string(np.p) +
                         " also divides the denominator");
      }
    }
  }
  // Numerator prime powers below 2^64 fold into one word; larger ones stay
  // symbolic and go through pow_mod per factor.
  u128 small = 1;
  std::vector<PrimeExponent> large;
  for (const auto& np : mult.numer) {
    u128 v = 1;
    bool fits = true;
    for (u64 i = 0; i < np.e && fits; ++i) {
      v *= np.p;
      fits = v < (u128(1) << 64);
    }
    if (fits && small * v < (u128(1) << 64)) {
      small *= v;
    } else {
      large.push_back(np);
    }
  }

  const std::vector<u128> a = residues(factors, mult.base, mult.exponent, small, large);
  std::vector<UnitFraction> out;
  out.reserve(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out.push_back({a[j], factors[j].q});
  return out;
}

}  // namespace nthdigit
