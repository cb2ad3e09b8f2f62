#include <gmpxx.h>
#include <mpfr.h>

#include "doctest.h"
#include "nthdigit/binomfactor.hpp"
#include "nthdigit/errors.hpp"
#include "nthdigit/oracle.hpp"

using namespace nthdigit;
using namespace nthdigit::oracle;

namespace {

// Base-10 digits of |x| after the point from MPFR at `prec` bits.
std::string mpfr_fraction_digits(mpfr_t x, std::size_t digits) {
  mpfr_exp_t exp = 0;
  char* s = mpfr_get_str(nullptr, &exp, 10, 0, x, MPFR_RNDZ);
  std::string all(s);
  mpfr_free_str(s);
  return all.substr(static_cast<std::size_t>(exp), digits);
}

}  // namespace

TEST_CASE("exact_term examples") {
  CHECK(exact_term(lookup("pi_eq1"), 4) == mpq_class(32, 35));
  CHECK(exact_term(lookup("pi_eq1"), 1) == 1);
  CHECK(exact_term(lookup("zeta3"), 2) == mpq_class(-1, 48));
  CHECK(exact_term(lookup("golden_ln"), 2) == mpq_class(-1, 12));
  CHECK(central_binomial(50).get_str() == "100891344545564193334812497256");
}

TEST_CASE("exact_term matches the factorization for n <= 100") {
  for (const auto& s : registry()) {
    for (u64 n = 1; n <= 100; ++n) {
      CAPTURE(s.name);
      CAPTURE(n);
      const mpq_class scaled = exact_term(s, n) * mpq_class(s.u) / mpq_class(s.w);
      REQUIRE(factorization_value(term_factorization(s, n)) == scaled);
    }
  }
}

TEST_CASE("reference_digits examples") {
  auto r = reference_digits("pi", 20, 10);
  CHECK(r.integer_part == "3");
  CHECK(r.fractional == "14159265358979323846");
  r = reference_digits("pi_squared", 10, 10);
  CHECK(r.integer_part == "9");
  CHECK(r.fractional == "8696044010");
  r = reference_digits("golden_ln", 10, 10);
  CHECK(r.integer_part == "0");
  CHECK(r.fractional == "4304089409");
  r = reference_digits("pi", 20, 16);
  CHECK(r.fractional == "243F6A8885A308D31319");
  CHECK(reference_digits("pi", 3, 100).fractional == "14:15:92");
  CHECK(reference_digits("pi_sqrt3", 5, 10).integer_part == "5");
  CHECK(reference_digits("zeta3", 7, 10).fractional == "2020569");
  CHECK(reference_digits("pi", 8, 2).fractional == "00100100");
}

TEST_CASE("bbp_hex_pi examples") {
  CHECK(bbp_hex_pi(1) == 2);
  CHECK(bbp_hex_pi(2) == 4);
  CHECK(bbp_hex_pi(6) == 0xA);
  CHECK_THROWS_AS(bbp_hex_pi(0), std::invalid_argument);
}

TEST_CASE("oracle self-consistency") {
  const auto eq1 = reference_digits("pi@eq1", 1000, 10);
  const auto eq3 = reference_digits("pi@eq3", 1000, 10);
  CHECK(eq1.fractional == eq3.fractional);

  const auto hex = reference_digits("pi", 400, 16);
  for (u64 d = 1; d <= 400; ++d) {
    CAPTURE(d);
    REQUIRE(bbp_hex_pi(d) == hex.fractional_values[d - 1]);
  }

  // More digits extend and never rewrite.
  for (const auto& s : registry()) {
    for (unsigned B : {2u, 10u, 16u, 200u}) {
      std::vector<unsigned> prev;
      for (u64 D : {1, 7, 40, 41, 150}) {
        const auto r = reference_digits(s.name, D, B);
        REQUIRE(r.fractional_values.size() == D);
        REQUIRE(std::equal(prev.begin(), prev.end(), r.fractional_values.begin()));
        prev = r.fractional_values;
      }
    }
  }
}

TEST_CASE("reference digits agree with MPFR to 1000 places") {
  const mpfr_prec_t prec = 3500;
  mpfr_t x, t;
  mpfr_inits2(prec, x, t, static_cast<mpfr_ptr>(nullptr));
  auto check = [&](const char* name) {
    CAPTURE(name);
    const auto r = reference_digits(name, 1000, 10);
    CHECK(r.fractional == mpfr_fraction_digits(x, 1000));
  };
  mpfr_const_pi(x, MPFR_RNDN);
  check("pi");
  check("pi@eq3");
  mpfr_sqr(x, x, MPFR_RNDN);
  check("pi_squared");
  mpfr_const_pi(x, MPFR_RNDN);
  mpfr_sqrt_ui(t, 3, MPFR_RNDN);
  mpfr_mul(x, x, t, MPFR_RNDN);
  check("pi_sqrt3");
  mpfr_zeta_ui(x, 3, MPFR_RNDN);
  check("zeta3");
  mpfr_sqrt_ui(t, 5, MPFR_RNDN);
  mpfr_add_ui(x, t, 1, MPFR_RNDN);
  mpfr_div_2ui(x, x, 1, MPFR_RNDN);
  mpfr_log(x, x, MPFR_RNDN);
  mpfr_mul_2ui(x, x, 1, MPFR_RNDN);
  mpfr_div(x, x, t, MPFR_RNDN);
  check("golden_ln");
  mpfr_clears(x, t, static_cast<mpfr_ptr>(nullptr));
}

TEST_CASE("fixture lines") {
  const auto r = reference_digits("zeta3", 30, 16);
  const std::string line = fixture_line(r);
  CHECK(line.rfind("zeta3 16 1.", 0) == 0);
  const auto back = parse_fixture_line(line);
  CHECK(back.constant == "zeta3");
  CHECK(back.base == 16);
  CHECK(back.integer_part == "1");
  CHECK(back.fractional == r.fractional);
  CHECK(back.fractional_values == r.fractional_values);
  CHECK_THROWS_AS(parse_fixture_line("pi 10 3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fixture_line("pi 10 3.14A"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fixture_line("pi"), std::invalid_argument);
}

TEST_CASE("verify_range") {
  auto rep = verify_range("pi", 1, 60, 10);
  CHECK(rep.mismatches.empty());
  CHECK(rep.checked == 60);
  CHECK(rep.min_confidence >= 1);
  rep = verify_range("pi", 1, 40, 16);
  CHECK(rep.mismatches.empty());
  rep = verify_range("zeta3", 90, 120, 10, 40, 3);
  CHECK(rep.mismatches.empty());
  CHECK(rep.from == 90);
  CHECK_THROWS_AS(verify_range("pi", 5, 4, 10), std::invalid_argument);
  CHECK_THROWS_AS(verify_range("e", 1, 4, 10), UnknownConstant);
}
