#include "nthdigit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "nthdigit/errors.hpp"
#include "nthdigit/extractor.hpp"
#include "nthdigit/fracsplit.hpp"
#include "nthdigit/oracle.hpp"

namespace nthdigit {

namespace {

using json = nlohmann::ordered_json;

struct Config {
  unsigned threads = 0;  // 0: resolve from env, then hardware
  int guard_bits = kDefaultGuardBits;
  bool json = false;
};

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("NTH_DIGITS_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0 || v > 4096) {
      throw CLI::ValidationError("NTH_DIGITS_THREADS", "must be an integer in [1, 4096]");
    }
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string seconds(std::chrono::nanoseconds ns) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << std::chrono::duration<double>(ns).count() << 's';
  return s.str();
}

double as_seconds(std::chrono::nanoseconds ns) { return std::chrono::duration<double>(ns).count(); }

std::string hex128(u128 v) {
  std::ostringstream s;
  s << std::hex << std::setfill('0') << std::setw(16) << static_cast<u64>(v >> 64)
    << std::setw(16) << static_cast<u64>(v);
  return s.str();
}

// ---- digits ----

struct DigitsArgs {
  std::string constant;
  u64 position = 1;
  unsigned base = 10;
  unsigned count = 1;
  int min_confidence = -1;
};

json digits_json(const std::string& name, const DigitResult& r, unsigned count, bool retried) {
  return {
      {"constant", name},
      {"series", r.series},
      {"integer_part", r.integer_part},
      {"base", r.base},
      {"position", r.position},
      {"count", count},
      {"digits", r.digits},
      {"digit_values", r.digit_values},
      {"confidence", r.confidence},
      {"error_bound_ulps", to_string(r.error_bound_ulps)},
      {"tail_bound_ulps", to_string(r.tail_bound_ulps)},
      {"terms_used", r.terms_used},
      {"guard_bits", r.guard_bits},
      {"guard_retried", retried},
      {"accumulator", hex128(r.accumulator.value)},
      {"elapsed_seconds", as_seconds(r.elapsed)},
  };
}

int cmd_digits(const DigitsArgs& a, const Config& cfg, std::ostream& out, std::ostream& err) {
  const unsigned threads = resolve_threads(cfg.threads);
  const unsigned want =
      a.min_confidence < 0 ? a.count : static_cast<unsigned>(a.min_confidence);
  if (want > a.count) throw CLI::ValidationError("--min-confidence", "cannot exceed --count");

  ExtractOptions opt{a.count, cfg.guard_bits, threads};
  DigitResult r = extract_digits(a.constant, a.position, a.base, opt);
  bool retried = false;
  if (r.confidence < want) {
    opt.guard_bits = cfg.guard_bits > 0 ? 2 * cfg.guard_bits : kDefaultGuardBits;
    r = extract_digits(a.constant, a.position, a.base, opt);
    retried = true;
  }

  if (cfg.json) {
    out << digits_json(a.constant, r, a.count, retried).dump() << '\n';
  } else {
    out << a.constant << " base=" << r.base << " pos=" << r.position << " digits=" << r.digits
        << " confidence=" << r.confidence << " terms=" << r.terms_used
        << " time=" << seconds(r.elapsed) << '\n';
  }
  if (r.confidence < want) {
    err << "low confidence: " << r.confidence << " of " << want
        << " digits certified after guard " << r.guard_bits << '\n';
    return kExitLowConfidence;
  }
  return kExitOk;
}

// ---- split / factor ----

std::string render_factors(std::span<const PrimePower> f) {
  std::string s;
  for (const auto& x : f) {
    if (!s.empty()) s += " * ";
    s += std::to_string(x.p);
    if (x.e > 1) s += "^" + std::to_string(x.e);
  }
  return s;
}

std::string render_terms(std::span<const UnitFraction> terms) {
  std::string s;
  for (const auto& t : terms) {
    if (!s.empty()) s += " + ";
    s += to_string(t.a) + "/" + to_string(t.q);
  }
  return s;
}

json terms_json(std::span<const UnitFraction> terms) {
  json arr = json::array();
  for (const auto& t : terms) arr.push_back({{"a", to_string(t.a)}, {"q", to_string(t.q)}});
  return arr;
}

json factors_json(std::span<const PrimePower> f) {
  json arr = json::array();
  for (const auto& x : f) arr.push_back({{"p", x.p}, {"e", x.e}, {"q", to_string(x.q)}});
  return arr;
}

// "p" or "p^e"; values must stay below 2^96.
u128 parse_modulus(const std::string& tok) {
  const auto caret = tok.find('^');
  const u128 base = parse_u128(tok.substr(0, caret));
  u64 e = 1;
  if (caret != std::string::npos) {
    const u128 ev = parse_u128(tok.substr(caret + 1));
    if (ev == 0 || ev > 127) throw std::invalid_argument("exponent out of range in " + tok);
    e = static_cast<u64>(ev);
  }
  if (base < 2) throw std::invalid_argument("factor must be >= 2: " + tok);
  u128 q = 1;
  for (u64 i = 0; i < e; ++i) {
    if (q >= kWideModulusLimit / base) throw ModulusOverflow("factor " + tok + " exceeds 2^96");
    q *= base;
  }
  check_modulus(q);
  return q;
}

// Unit fractions for 1/prod(q) in input order; the moduli need not be
// prime powers, only pairwise coprime.
std::vector<UnitFraction> split_moduli(const std::vector<u128>& q) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      if (ext_gcd(q[i], q[j]).g != 1) {
        throw NotCoprime(to_string(q[i]) + " and " + to_string(q[j]) + " share a factor");
      }
    }
  }
  if (q.size() == 1) return {{1, q[0]}};
  const std::vector<u128> cof = cofactor_products(q);
  std::vector<UnitFraction> out;
  for (std::size_t j = 0; j < q.size(); ++j) out.push_back({mod_inverse(cof[j], q[j]), q[j]});
  return out;
}

int cmd_split(u64 binomial, const std::vector<std::string>& factors, const Config& cfg,
              std::ostream& out) {
  if (binomial > 0) {
    const std::vector<PrimePower> f = factor_central_binomial(binomial);
    const SplitDecomposition d = decompose(f);
    const std::string m = oracle::central_binomial(binomial).get_str();
    if (cfg.json) {
      out << json{{"n", binomial},
                  {"modulus", m},
                  {"factors", factors_json(f)},
                  {"terms", terms_json(d.entries)}}
                 .dump()
          << '\n';
    } else {
      out << "1/C(" << 2 * binomial << "," << binomial << ") = 1/" << m << " = 1/("
          << render_factors(f) << ")\n"
          << render_terms(d.entries) << '\n';
    }
    return kExitOk;
  }
  std::vector<u128> q;
  for (const auto& tok : factors) q.push_back(parse_modulus(tok));
  const std::vector<UnitFraction> terms = split_moduli(q);
  if (cfg.json) {
    json mod = json::array();
    for (u128 x : q) mod.push_back(to_string(x));
    out << json{{"moduli", mod}, {"terms", terms_json(terms)}}.dump() << '\n';
  } else {
    out << render_terms(terms) << '\n';
  }
  return kExitOk;
}

int cmd_factor(u64 binomial, const Config& cfg, std::ostream& out) {
  const std::vector<PrimePower> f = factor_central_binomial(binomial);
  if (cfg.json) {
    out << json{{"n", binomial},
                {"modulus", oracle::central_binomial(binomial).get_str()},
                {"factors", factors_json(f)}}
               .dump()
        << '\n';
  } else {
    out << render_factors(f) << '\n';
  }
  return kExitOk;
}

// ---- verify / reference ----

int cmd_verify(const std::string& constant, u64 from, u64 to, unsigned base, const Config& cfg,
               std::ostream& out, std::ostream& err) {
  if (from > to) throw CLI::ValidationError("--from", "must not exceed --to");
  if (to - from > 10000) throw CLI::ValidationError("--to", "range is limited to 10000 positions");
  const auto rep =
      oracle::verify_range(constant, from, to, base, cfg.guard_bits, resolve_threads(cfg.threads));
  if (cfg.json) {
    json mism = json::array();
    for (const auto& m : rep.mismatches) {
      mism.push_back({{"position", m.position}, {"expected", m.expected}, {"actual", m.actual}});
    }
    out << json{{"constant", constant},
                {"base", base},
                {"from", from},
                {"to", to},
                {"checked", rep.checked},
                {"mismatches", mism},
                {"min_confidence", rep.min_confidence}}
               .dump()
        << '\n';
  } else {
    out << constant << " base=" << base << " from=" << from << " to=" << to
        << " checked=" << rep.checked << " mismatches=" << rep.mismatches.size()
        << " min_confidence=" << rep.min_confidence << '\n';
  }
  if (!rep.mismatches.empty()) {
    const auto& m = rep.mismatches.front();
    err << "first mismatch at position " << m.position << ": expected " << m.expected
        << ", got " << m.actual << '\n';
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_reference(const std::string& constant, u64 count, unsigned base, const Config& cfg,
                  std::ostream& out) {
  const auto ref = oracle::reference_digits(constant, count, base);
  if (cfg.json) {
    out << json{{"constant", ref.constant},
                {"series", ref.series},
                {"base", ref.base},
                {"integer_part", ref.integer_part},
                {"fractional", ref.fractional},
                {"precision_terms", ref.precision_terms},
                {"guard_digits", ref.guard_digits}}
               .dump()
        << '\n';
  } else {
    out << oracle::fixture_line(ref) << '\n';
  }
  return kExitOk;
}

// ---- bench ----

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_bench(const std::string& constant, const std::vector<u64>& positions, unsigned repeat,
              unsigned base, const Config& cfg, std::ostream& out) {
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] <= positions[i - 1]) {
      throw CLI::ValidationError("--positions", "must be strictly increasing");
    }
  }
  const unsigned threads = resolve_threads(cfg.threads);
  json rows = json::array();
  std::vector<double> xs, medians;
  for (u64 d : positions) {
    std::vector<double> samples;
    DigitResult last;
    for (unsigned r = 0; r < repeat; ++r) {
      last = extract_digits(constant, d, base, {1, cfg.guard_bits, threads});
      samples.push_back(as_seconds(last.elapsed));
    }
    const double med = median(samples);
    xs.push_back(static_cast<double>(d));
    medians.push_back(med);
    rows.push_back({{"position", d},
                    {"digit", last.digits},
                    {"confidence", last.confidence},
                    {"terms", last.terms_used},
                    {"median_seconds", med},
                    {"samples", samples}});
    if (!cfg.json) {
      out << constant << " base=" << base << " pos=" << d << " digit=" << last.digits
          << " terms=" << last.terms_used << " median=" << std::fixed << std::setprecision(4)
          << med << "s repeat=" << repeat << '\n';
      out.unsetf(std::ios::floatfield);
    }
  }
  const bool fit = xs.size() >= 3;
  const double slope = fit ? loglog_slope(xs, medians) : 0.0;
  if (cfg.json) {
    out << json{{"constant", constant},
                {"base", base},
                {"repeat", repeat},
                {"threads", threads},
                {"rows", rows},
                {"exponent", fit ? json(slope) : json(nullptr)}}
               .dump()
        << '\n';
  } else if (fit) {
    out << "exponent=" << std::fixed << std::setprecision(3) << slope << '\n';
    out.unsetf(std::ios::floatfield);
  }
  return kExitOk;
}

int cmd_list(std::ostream& out) {
  for (auto name : constant_names()) {
    const SeriesDef& s = lookup(name);
    out << name << " (" << s.name << ", integer part " << s.integer_part << "): "
        << s.description << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Digits of pi and related constants at a given position, without the earlier digits"};
  app.name("nth_digits");
  app.require_subcommand(1);

  Config cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (env NTH_DIGITS_THREADS)")
        ->check(CLI::Range(1u, 4096u));
    sub->add_option("--guard", cfg.guard_bits, "Guard bits below the last digit")
        ->check(CLI::Range(0, 1000));
    sub->add_flag("--json", cfg.json, "JSON output");
  };

  DigitsArgs dargs;
  auto* digits = app.add_subcommand("digits", "Extract digits at a position");
  digits->add_option("constant", dargs.constant, "Constant name")->required();
  digits->add_option("-p,--position", dargs.position, "1-based fractional position")
      ->check(CLI::Range(u64{1}, u64{1} << 40));
  digits->add_option("-b,--base", dargs.base, "Base")->check(CLI::Range(2u, kMaxBase));
  digits->add_option("-k,--count", dargs.count, "Digits to extract")
      ->check(CLI::Range(1u, kMaxCount));
  digits->add_option("--min-confidence", dargs.min_confidence,
                     "Certified digits required (default: count)")
      ->check(CLI::Range(0, static_cast<int>(kMaxCount)));
  add_common(digits);

  u64 binomial = 0;
  std::vector<std::string> factor_list;
  auto* split = app.add_subcommand("split", "Split 1/M into unit fractions");
  auto* bopt = split->add_option("--binomial", binomial, "M = C(2n, n)")
                   ->check(CLI::Range(u64{1}, u64{1} << 32));
  auto* fopt = split->add_option("--factors", factor_list, "Coprime moduli p or p^e")
                   ->delimiter(',');
  bopt->excludes(fopt);
  add_common(split);

  u64 factor_n = 0;
  auto* factor = app.add_subcommand("factor", "Prime-power factorization of C(2n, n)");
  factor->add_option("--binomial", factor_n, "n")->required()->check(CLI::Range(u64{1}, u64{1} << 32));
  add_common(factor);

  std::string vconst;
  u64 vfrom = 1, vto = 200;
  unsigned vbase = 10;
  auto* verify = app.add_subcommand("verify", "Compare extracted digits with the exact oracle");
  verify->add_option("constant", vconst)->required();
  verify->add_option("--from", vfrom)->check(CLI::Range(u64{1}, u64{1} << 40));
  verify->add_option("--to", vto)->check(CLI::Range(u64{1}, u64{1} << 40));
  verify->add_option("-b,--base", vbase)->check(CLI::Range(2u, kMaxBase));
  add_common(verify);

  std::string rconst;
  u64 rcount = 100;
  unsigned rbase = 10;
  auto* reference = app.add_subcommand("reference", "Exact leading digits as a fixture line");
  reference->add_option("constant", rconst)->required();
  reference->add_option("-n,--digits", rcount)->check(CLI::Range(u64{1}, u64{100000}));
  reference->add_option("-b,--base", rbase)->check(CLI::Range(2u, kMaxBase));
  add_common(reference);

  std::string bconst;
  std::vector<u64> positions = {1000, 2000, 4000, 8000};
  unsigned repeat = 3, bbase = 10;
  auto* bench = app.add_subcommand("bench", "Time extraction across positions");
  bench->add_option("constant", bconst)->required();
  bench->add_option("--positions", positions)->delimiter(',')->check(CLI::Range(u64{1}, u64{1} << 40));
  bench->add_option("--repeat", repeat)->check(CLI::Range(1u, 1000u));
  bench->add_option("-b,--base", bbase)->check(CLI::Range(2u, kMaxBase));
  add_common(bench);

  auto* list = app.add_subcommand("list", "Supported constants");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (*digits) return cmd_digits(dargs, cfg, out, err);
    if (*split) {
      if (binomial == 0 && factor_list.empty()) {
        throw CLI::ValidationError("split", "one of --binomial or --factors is required");
      }
      return cmd_split(binomial, factor_list, cfg, out);
    }
    if (*factor) return cmd_factor(factor_n, cfg, out);
    if (*verify) return cmd_verify(vconst, vfrom, vto, vbase, cfg, out, err);
    if (*reference) return cmd_reference(rconst, rcount, rbase, cfg, out);
    if (*bench) return cmd_bench(bconst, positions, repeat, bbase, cfg, out);
    if (*list) return cmd_list(out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModulusOverflow& e) {
    err << "error: " << e.what() << '\n';
    return kExitOverflow;
  } catch (const std::exception& e) {
    // UnknownConstant, NotCoprime and argument errors are all usage errors.
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nthdigit
