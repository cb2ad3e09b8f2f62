#pragma once

// Registry of constants expressed as central-binomial series
//
//   S = sum_{n>=1} w(n) * |c|^n / (n^s * C(2n, n)),   constant = (u*S + v) / w
//
// where w(n) = 1 for c > 0 and (-1)^(n-1) for c < 0.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace nthdigit {

struct SeriesDef {
  std::string name;      // registry key, e.g. "pi_eq1"
  std::string constant;  // the constant it yields, e.g. "pi"
  int c = 1;             // |c| in {1, 2}; c < 0 encodes (-1)^(n-1) alternation
  int s = 0;             // term carries n^(-s), s in [-1, 3]
  std::int64_t u = 1;
  std::int64_t v = 0;
  std::int64_t w = 1;
  std::string integer_part;  // decimal integer part of the constant
  std::string description;

  int abs_c() const { return c < 0 ? -c : c; }
  /// Sign of term n before the affine map.
  int term_sign(std::uint64_t n) const { return (c < 0 && n % 2 == 0) ? -1 : 1; }
};

std::span<const SeriesDef> registry();

/// Accepts registry keys plus the CLI aliases "pi", "pi@eq1", "pi@eq3".
/// Throws UnknownConstant otherwise.
const SeriesDef& lookup(std::string_view name);

/// Names accepted by lookup(), in display order.
std::span<const std::string_view> constant_names();

/// Upper bound on log2 |term_n| from C(2n,n) >= 4^n / (2 sqrt(n)).
double term_log_bound(const SeriesDef& series, std::uint64_t n);

/// Upper bound on log2 of sum_{n>N} |term_n|, or +inf when the geometric
/// majorant does not converge from N+1 on.
double tail_log_bound(const SeriesDef& series, std::uint64_t N);

/// Smallest N with sum_{n>N} |term_n| < 2^-guard_bits * B^-d, by forward scan.
std::uint64_t tail_cutoff(const SeriesDef& series, std::uint64_t d, unsigned base,
                          int guard_bits);

}  // namespace nthdigit
