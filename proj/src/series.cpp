#include "nthdigit/series.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "nthdigit/errors.hpp"

namespace nthdigit {

namespace {

// Affine maps are checked against independent high-precision values of each
// constant in tests/test_series.cpp.
const std::array<SeriesDef, 6> kRegistry = {{
    {"pi_eq1", "pi", 2, -1, 1, -3, 1, "3",
     "pi + 3 = sum n 2^n / C(2n,n)"},
    {"pi_eq3", "pi", 2, 1, 2, 0, 1, "3",
     "pi / 2 = sum 2^n / (n C(2n,n))"},
    {"pi_sqrt3", "pi_sqrt3", 1, 0, 27, -9, 2, "5",
     "1/3 + 2 pi sqrt(3) / 27 = sum 1 / C(2n,n)"},
    {"pi_squared", "pi_squared", 1, 2, 18, 0, 1, "9",
     "pi^2 / 18 = sum 1 / (n^2 C(2n,n))"},
    {"zeta3", "zeta3", -1, 3, 5, 0, 2, "1",
     "2 zeta(3) / 5 = sum (-1)^(n-1) / (n^3 C(2n,n))"},
    {"golden_ln", "golden_ln", -1, 1, 1, 0, 1, "0",
     "(2 / sqrt(5)) ln(phi) = sum (-1)^(n-1) / (n C(2n,n))"},
}};

constexpr std::array<std::string_view, 7> kNames = {
    "pi", "pi@eq1", "pi@eq3", "pi_sqrt3", "pi_squared", "zeta3", "golden_ln"};

std::string known_names() {
  std::string out;
  for (auto n : kNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

std::span<const SeriesDef> registry() { return kRegistry; }

std::span<const std::string_view> constant_names() { return kNames; }

const SeriesDef& lookup(std::string_view name) {
  if (name == "pi" || name == "pi@eq1") name = "pi_eq1";
  if (name == "pi@eq3") name = "pi_eq3";
  for (const auto& def : kRegistry) {
    if (def.name == name) return def;
  }
  if (name == "e" || name == "exp1" || name == "exp(1)") {
    throw UnknownConstant(
        "e is not supported: its series sum 1/n! has denominators containing prime "
        "powers such as 2^(n-1) that outgrow a machine word, so it cannot be split "
        "into word-sized fractions");
  }
  throw UnknownConstant("unknown constant '" + std::string(name) +
                        "' (known: " + known_names() + ")");
}

double term_log_bound(const SeriesDef& series, std::uint64_t n) {
  const double nd = static_cast<double>(n);
  return nd * std::log2(static_cast<double>(series.abs_c())) - 2.0 * nd +
         std::log2(2.0 * std::sqrt(nd)) - series.s * std::log2(nd);
}

double tail_log_bound(const SeriesDef& series, std::uint64_t N) {
  const double next = static_cast<double>(N + 1);
  // Ratio |t_{n+1} / t_n| <= |c|/4 (1 + 1/n)^{3/2} for every s >= -1.
  const double ratio = series.abs_c() / 4.0 * std::pow(1.0 + 1.0 / next, 1.5);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  // 0.01 bits of slack for floating-point rounding in the bound itself.
  return term_log_bound(series, N + 1) - std::log2(1.0 - ratio) + 0.01;
}

std::uint64_t tail_cutoff(const SeriesDef& series, std::uint64_t d, unsigned base,
                          int guard_bits) {
  const double target = -static_cast<double>(guard_bits) -
                        static_cast<double>(d) * std::log2(static_cast<double>(base));
  std::uint64_t N = 1;
  while (!(tail_log_bound(series, N) < target)) ++N;
  return N;
}

}  // namespace nthdigit
