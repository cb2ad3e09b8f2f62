// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <gmpxx.h>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "crt_support.hpp"
#include "nthdigit/cli.hpp"
#include "nthdigit/extractor.hpp"
#include "nthdigit/fracsplit.hpp"
#include "nthdigit/oracle.hpp"

using namespace nthdigit;
using namespace nthdigit::testing;
using json = nlohmann::json;

namespace {

// Failure details go here; the verdict line goes to stdout.
std::ostringstream notes;

std::string run_cli_out(const std::vector<std::string>& args, int* code = nullptr) {
  std::ostringstream out, err;
  const int c = run_cli(args, out, err);
  if (code) *code = c;
  return out.str();
}

std::string shell(const std::string& cmd, int* status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), p)) out += buf.data();
  *status = pclose(p);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- 1 ----
bool paper_example() {
  const std::string split = run_cli_out({"split", "--binomial", "50"});
  const std::string want_terms =
      "5/8 + 20/81 + 10/11 + 2/13 + 13/17 + 10/19 + 4/29 + 5/31 + 23/53 + 41/59 + 29/61 + "
      "37/67 + 33/71 + 19/73 + 36/79 + 7/83 + 13/89 + 88/97";
  const std::string want_factors =
      "2^3 * 3^4 * 11 * 13 * 17 * 19 * 29 * 31 * 53 * 59 * 61 * 67 * 71 * 73 * 79 * 83 * 89 * 97";
  bool ok = true;
  if (split.substr(split.find('\n') + 1) != want_terms + "\n") {
    notes << "split output:\n" << split;
    ok = false;
  }
  if (split.find("= 1/(" + want_factors + ")\n") == std::string::npos) {
    notes << "split header lacks the paper's factor list\n";
    ok = false;
  }
  const std::string factor = run_cli_out({"factor", "--binomial", "50"});
  if (factor != want_factors + "\n") {
    notes << "factor output: " << factor;
    ok = false;
  }
  const mpz_class M = product(factor_central_binomial(50));
  if (M.get_str() != "100891344545564193334812497256" || M != oracle::central_binomial(50)) {
    notes << "M = " << M.get_str() << "\n";
    ok = false;
  }
  return ok;
}

// ---- 2 ----
bool legendre_popcount() {
  for (u64 n = 0; n <= 10000; ++n) {
    if (binomial_valuation(2, n) != static_cast<unsigned>(std::popcount(n))) {
      notes << "valuation at 2 differs from popcount at n=" << n << "\n";
      return false;
    }
  }
  for (u64 n = 1; n <= 300; ++n) {
    const mpz_class c = oracle::central_binomial(n);
    for (u64 p : primes_up_to(2 * n)) {
      const mpz_class pz(static_cast<unsigned long>(p));
      mpz_class rest;
      const unsigned v = static_cast<unsigned>(
          mpz_remove(rest.get_mpz_t(), c.get_mpz_t(), pz.get_mpz_t()));
      if (binomial_valuation(p, n) != v) {
        notes << "valuation mismatch p=" << p << " n=" << n << "\n";
        return false;
      }
    }
  }
  return true;
}

// ---- 3 ----
bool pi_thousand() {
  const auto ref = oracle::reference_digits("pi", 1000, 10);
  const ExtractOptions opt{1, kDefaultGuardBits, workers()};
  for (u64 d = 1; d <= 1000; ++d) {
    const DigitResult a = extract_digits("pi@eq1", d, 10, opt);
    const DigitResult b = extract_digits("pi@eq3", d, 10, opt);
    if (a.digit_values[0] != ref.fractional_values[d - 1] || a.confidence < 1) {
      notes << "pi_eq1 at d=" << d << ": got " << a.digits << " conf " << a.confidence
            << ", want " << ref.fractional[d - 1] << "\n";
      return false;
    }
    if (b.digits != a.digits || b.confidence < 1) {
      notes << "pi_eq3 at d=" << d << ": got " << b.digits << " conf " << b.confidence << "\n";
      return false;
    }
  }
  return true;
}

// ---- 4 ----
bool other_constants() {
  const ExtractOptions opt{1, kDefaultGuardBits, workers()};
  for (const char* c : {"pi_sqrt3", "pi_squared", "zeta3", "golden_ln"}) {
    for (unsigned base : {2u, 10u, 16u}) {
      const auto ref = oracle::reference_digits(c, 200, base);
      for (u64 d = 1; d <= 200; ++d) {
        const DigitResult r = extract_digits(c, d, base, opt);
        if (r.digit_values[0] != ref.fractional_values[d - 1] || r.confidence < 1) {
          notes << c << " base " << base << " d=" << d << ": got " << r.digits << "\n";
          return false;
        }
      }
    }
  }
  return true;
}

// ---- 5 ----
bool bbp_cross_check() {
  for (u64 d = 1; d <= 100; ++d) {
    const DigitResult r = extract_digits("pi", d, 16);
    if (r.digit_values[0] != oracle::bbp_hex_pi(d) || r.confidence < 1) {
      notes << "hex digit " << d << ": extractor " << r.digits << ", BBP "
            << oracle::bbp_hex_pi(d) << "\n";
      return false;
    }
  }
  return true;
}

// ---- 6 ----
bool crt_suite() {
  std::mt19937_64 rng(20240601);
  const auto pool = prime_power_pool(1 << 20);
  long cases = 0;
  auto fail = [&](const char* what) {
    notes << what << " after " << cases << " cases\n";
    return false;
  };
  for (int i = 0; i < 60000; ++i, ++cases) {
    auto f = random_factors(rng, pool, 1 + rng() % 8);
    const SplitDecomposition d = decompose(f);
    mpq_class sum = 0;
    for (const auto& e : d.entries) {
      if (e.a >= e.q) return fail("decompose residue out of range");
      sum += mpq_class(big(e.a), big(e.q));
    }
    if (!is_integer(sum - mpq_class(1, product(f)))) return fail("decompose mod-1 identity");
    std::shuffle(f.begin(), f.end(), rng);
    if (decompose(f).entries != d.entries) return fail("decompose permutation invariance");
  }
  for (int i = 0; i < 50000; ++i, ++cases) {
    auto f = random_factors(rng, pool, 1 + rng() % 8);
    ScaledNumerator mult;
    mult.base = 2 + rng() % 255;
    mult.exponent = rng() % 5000;
    for (u64 p : {3ull, 7ull, 1000003ull}) {
      if (rng() % 2 == 0) continue;
      if (std::any_of(f.begin(), f.end(), [&](const PrimePower& x) { return x.p == p; })) continue;
      mult.numer.push_back({p, rng() % 3000});
    }
    const auto r = scaled_residues(mult, f);
    const mpz_class M = product(f);
    mpz_class num;
    mpz_powm_ui(num.get_mpz_t(), mpz_class(static_cast<unsigned long>(mult.base)).get_mpz_t(),
                mult.exponent, M.get_mpz_t());
    for (const auto& np : mult.numer) {
      mpz_class t;
      mpz_powm_ui(t.get_mpz_t(), mpz_class(static_cast<unsigned long>(np.p)).get_mpz_t(), np.e,
                  M.get_mpz_t());
      num = num * t % M;
    }
    mpq_class sum = 0;
    for (const auto& e : r) {
      if (e.a >= e.q) return fail("scaled residue out of range");
      sum += mpq_class(big(e.a), big(e.q));
    }
    if (!is_integer(sum - mpq_class(num, M))) return fail("scaled_residues mod-1 identity");
    // Input order is preserved, so a permutation permutes the residues.
    std::vector<std::size_t> perm(f.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<PrimePower> g;
    for (std::size_t k : perm) g.push_back(f[k]);
    const auto rg = scaled_residues(mult, g);
    for (std::size_t k = 0; k < perm.size(); ++k) {
      if (!(rg[k] == r[perm[k]])) return fail("scaled_residues permutation invariance");
    }
  }
  std::cout << "  (" << cases << " randomized cases)\n";
  return cases >= 100000;
}

// ---- 7 ----
bool complexity_trend() {
  int code = 0;
  const std::string out = run_cli_out({"bench", "pi", "--positions", "1000,2000,4000,8000",
                                       "--repeat", "3", "--json", "--threads",
                                       std::to_string(workers())},
                                      &code);
  if (code != 0) return false;
  const json j = json::parse(out);
  for (const auto& row : j["rows"]) {
    std::cout << "  d=" << row["position"] << " median " << row["median_seconds"] << " s\n";
  }
  const double p = j["exponent"];
  std::cout << "  fitted exponent " << p << "\n";
  return p >= 1.5 && p <= 3.5;
}

// ---- 8 ----
// Every scalar on the extraction path is one of these; none exceeds 192 bits,
// and products of two residues below 2^96 fit in 192 bits.
static_assert(sizeof(u128) * 8 <= 192);
static_assert(sizeof(i128) * 8 <= 192);
static_assert(sizeof(FixedPointFrac) * 8 <= 192);
static_assert(sizeof(UnitFraction::a) * 8 <= 192 && sizeof(UnitFraction::q) * 8 <= 192);
static_assert(sizeof(PrimePower::q) * 8 <= 192);

bool fixed_memory() {
  bool ok = true;
  const std::regex bignum(R"(gmp|mpfr|mpir|boost)", std::regex::icase);

  const std::string links = read_file(NTH_DIGITS_CORE_LINKS);
  if (links.empty() || std::regex_search(links, bignum)) {
    notes << "core link libraries: " << links;
    ok = false;
  }

  const std::string src = NTH_DIGITS_SOURCE_DIR;
  for (const char* f : {"src/modarith.cpp", "src/binomfactor.cpp", "src/fracsplit.cpp",
                        "src/series.cpp", "src/extractor.cpp", "include/nthdigit/modarith.hpp",
                        "include/nthdigit/binomfactor.hpp", "include/nthdigit/fracsplit.hpp",
                        "include/nthdigit/series.hpp", "include/nthdigit/extractor.hpp",
                        "include/nthdigit/errors.hpp"}) {
    const std::string text = read_file(src + "/" + f);
    std::istringstream lines(text);
    std::string line;
    if (text.empty()) {
      notes << "missing " << f << "\n";
      ok = false;
    }
    while (std::getline(lines, line)) {
      if (line.rfind("#include", 0) == 0 &&
          (std::regex_search(line, bignum) || line.find("oracle") != std::string::npos)) {
        notes << f << ": " << line << "\n";
        ok = false;
      }
    }
  }

  int status = 0;
  const std::string symbols =
      shell(std::string("nm -u ") + NTH_DIGITS_CORE_ARCHIVE + " 2>&1", &status);
  if (status != 0 || std::regex_search(symbols, std::regex(R"(__gmp|mpfr_)"))) {
    notes << "core archive references big-number symbols or nm failed\n";
    ok = false;
  }
  const std::string deps = shell(std::string("ldd ") + NTH_DIGITS_CORE_PROBE + " 2>&1", &status);
  if (status != 0 || std::regex_search(deps, bignum)) {
    notes << "core_probe dependencies:\n" << deps;
    ok = false;
  }
  shell(NTH_DIGITS_CORE_PROBE, &status);
  if (status != 0) {
    notes << "core_probe failed\n";
    ok = false;
  }

  const std::vector<std::vector<std::string>> runs = {
      {"digits", "pi", "-p", "1500", "-k", "12"},
      {"digits", "zeta3", "-p", "700", "-b", "16", "-k", "10"},
      {"digits", "golden_ln", "-p", "900", "-b", "2", "-k", "30"},
      {"digits", "pi_squared", "-p", "333", "-b", "256", "-k", "4"}};
  for (auto args : runs) {
    args.push_back("--json");
    auto one = args, eight = args;
    one.insert(one.end(), {"--threads", "1"});
    eight.insert(eight.end(), {"--threads", "8"});
    const json a = json::parse(run_cli_out(one));
    const json b = json::parse(run_cli_out(eight));
    if (a["digits"] != b["digits"] || a["accumulator"] != b["accumulator"] ||
        a["confidence"] != b["confidence"]) {
      notes << "thread counts disagree for " << args[1] << "\n";
      ok = false;
    }
  }
  return ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria = {
      {"paper example: C(100,50) split, factor list and M", paper_example},
      {"Legendre valuation, popcount and big-integer agreement", legendre_popcount},
      {"pi digits 1..1000 base 10 match oracle; eq1 == eq3", pi_thousand},
      {"pi_sqrt3, pi_squared, zeta3, golden_ln 1..200 in bases 2, 10, 16", other_constants},
      {"base-16 pi digits 1..100 match BBP", bbp_cross_check},
      {"randomized CRT property suite", crt_suite},
      {"complexity exponent over d = 1000..8000 in [1.5, 3.5]", complexity_trend},
      {"extraction path is word-sized, thread count invariant", fixed_memory},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    notes.str("");
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[i].second();
    } catch (const std::exception& e) {
      notes << "exception: " << e.what() << "\n";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << i + 1 << ": " << (ok ? "PASS" : "FAIL") << " - "
              << criteria[i].first << " (" << secs << " s)" << std::endl;
    if (!ok) {
      std::cout << notes.str();
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
