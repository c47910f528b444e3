#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "heightdyn/scalars.hpp"
#include "support.hpp"

using namespace heightdyn;
using testing::random_quadratic;
using testing::random_rational;

namespace {
const QuadraticNumber beta(2, 1, 3);
const QuadraticNumber sqrt3(0, 1, 3);
}  // namespace

TEST_CASE("canonical form") {
  QuadraticNumber x(Rational(4, 6), Rational(0), 3);
  CHECK(x.rational_part() == Rational(2, 3));
  CHECK(x.radicand() == 0);

  QuadraticNumber y(0, 1, 12);  // √12 = 2√3
  CHECK(y == QuadraticNumber(0, 2, 3));
  CHECK(y.radicand() == 3);

  QuadraticNumber z(1, 3, 4);  // 1 + 3·2
  CHECK(z.is_rational());
  CHECK(z == QuadraticNumber(7));

  QuadraticNumber w(5, 2, 1);
  CHECK(w == QuadraticNumber(7));
  CHECK(QuadraticNumber(3, 0, 7) == QuadraticNumber(3));
  CHECK_THROWS_AS(QuadraticNumber(0, 1, -3), DomainError);
}

TEST_CASE("arith examples") {
  CHECK(beta * beta.conjugate() == QuadraticNumber(1));
  CHECK(beta.inverse() == QuadraticNumber(2, -1, 3));
  CHECK(arith(QuadraticNumber(1, 0, 3), sqrt3, ArithOp::add) == QuadraticNumber(1, 1, 3));
  CHECK(arith(beta, beta, ArithOp::sub).is_zero());
  CHECK(arith(beta, beta, ArithOp::div) == QuadraticNumber(1));
  CHECK(arith(beta, QuadraticNumber(2), ArithOp::mul) == QuadraticNumber(4, 2, 3));
  CHECK(beta * beta == QuadraticNumber(7, 4, 3));
}

TEST_CASE("arith errors") {
  const QuadraticNumber sqrt2(0, 1, 2);
  CHECK_THROWS_AS(sqrt2 + sqrt3, IncompatibleFieldError);
  CHECK_THROWS_AS(sqrt2 * sqrt3, IncompatibleFieldError);
  CHECK_THROWS_AS(beta / QuadraticNumber(0), DomainError);
  CHECK_THROWS_AS(QuadraticNumber(0).inverse(), DomainError);
  CHECK_THROWS_AS((void)(sqrt2 < sqrt3), IncompatibleFieldError);
  // A rational operand mixes with any field.
  CHECK(sqrt2 + QuadraticNumber(1) == QuadraticNumber(1, 1, 2));
}

TEST_CASE("sign examples") {
  CHECK(QuadraticNumber(11, -4, 7).sign() == 1);
  CHECK(QuadraticNumber(2, -1, 5).sign() == -1);
  CHECK(QuadraticNumber(0).sign() == 0);
  CHECK(QuadraticNumber(-11, 4, 7).sign() == -1);
  CHECK(QuadraticNumber(-2, 1, 5).sign() == 1);
  CHECK(QuadraticNumber(0, -1, 2).sign() == -1);
}

TEST_CASE("sign agrees with a floating oracle") {
  for (int i = 0; i < 2000; ++i) {
    const long d = std::vector<long>{2, 3, 5, 6, 7, 11}[i % 6];
    const auto x = random_quadratic(d);
    const long double v = testing::approx(x);
    if (std::fabs(v) < 1e-9L) continue;
    CHECK(x.sign() == (v > 0 ? 1 : -1));
  }
}

TEST_CASE("comparison") {
  CHECK(QuadraticNumber(2, -1, 3) < QuadraticNumber(Rational(1, 3)));
  CHECK(QuadraticNumber(7, -4, 3) < QuadraticNumber(2, -1, 3));
  CHECK(QuadraticNumber(7, 4, 3) > QuadraticNumber(13));
  CHECK(QuadraticNumber(7, 4, 3) < QuadraticNumber(14));
}

TEST_CASE("field axioms on random samples") {
  for (int i = 0; i < 300; ++i) {
    const long d = std::vector<long>{2, 3, 7}[i % 3];
    const auto x = random_quadratic(d), y = random_quadratic(d), z = random_quadratic(d);
    CHECK((x * y) * z == x * (y * z));
    CHECK((x + y) * z == x * z + y * z);
    CHECK(x + y == y + x);
    if (!x.is_zero()) CHECK(x * x.inverse() == QuadraticNumber(1));
    CHECK(sign(x * y) == sign(x) * sign(y));
    CHECK((x - x).is_zero());
    CHECK(x.norm() == (x * x.conjugate()).rational_part());
  }
}

TEST_CASE("sqrt_decompose") {
  auto r = sqrt_decompose(Rational(112));
  CHECK(r.coefficient == 4);
  CHECK(r.radicand == 7);
  r = sqrt_decompose(Rational(9, 4));
  CHECK(r.coefficient == Rational(3, 2));
  CHECK(r.radicand == 1);
  r = sqrt_decompose(Rational(0));
  CHECK(r.coefficient == 0);
  CHECK(r.radicand == 1);
  r = sqrt_decompose(Rational(3, 8));  // √(3/8) = (1/4)√6
  CHECK(r.coefficient == Rational(1, 4));
  CHECK(r.radicand == 6);
  CHECK_THROWS_AS(sqrt_decompose(Rational(-1)), DomainError);
}

TEST_CASE("sqrt_decompose reconstructs its input") {
  for (int i = 0; i < 300; ++i) {
    const Rational q = testing::random_positive(5000, 200);
    const auto r = sqrt_decompose(q);
    CHECK(r.coefficient * r.coefficient * r.radicand == q);
    CHECK(squarefree_split(r.radicand).square_root == 1);
  }
}

TEST_CASE("squarefree_split") {
  auto s = squarefree_split(Integer(720));  // 144·5
  CHECK(s.square_root == 12);
  CHECK(s.squarefree == 5);
  // 2·3·487083044419·342173000223132751
  s = squarefree_split(Integer("1000000000000000000000000000014"));
  CHECK(s.square_root == 1);
  CHECK(s.squarefree == Integer("1000000000000000000000000000014"));
  const Integer p("487083044419"), q("342173000223132751");
  s = squarefree_split(Integer(12) * p * p * q);
  CHECK(s.square_root == 2 * p);
  CHECK(s.squarefree == 3 * q);
  s = squarefree_split(q * q * q);
  CHECK(s.square_root == q);
  CHECK(s.squarefree == q);
}

TEST_CASE("squarefree_split on products of known primes") {
  std::srand(11);
  for (int trial = 0; trial < 50; ++trial) {
    // Distinct primes of varied size; even exponents go to the root.
    Integer n = 1, root = 1, free = 1, prime = 1;
    for (int k = 0; k < 4; ++k) {
      Integer start = Integer(std::rand() % 1000 + 2) << (std::rand() % 24);
      if (start <= prime) start = prime + 1;
      mpz_nextprime(prime.get_mpz_t(), start.get_mpz_t());
      const int e = std::rand() % 4;
      for (int i = 0; i < e; ++i) n *= prime;
      for (int i = 0; i < e / 2; ++i) root *= prime;
      if (e % 2 == 1) free *= prime;
    }
    const auto s = squarefree_split(n);
    CHECK(s.square_root == root);
    CHECK(s.squarefree == free);
  }
}

TEST_CASE("exact_sqrt") {
  auto r = exact_sqrt(QuadraticNumber(7, 4, 3), 3);
  REQUIRE(r);
  CHECK(*r == beta);
  r = exact_sqrt(QuadraticNumber(112), 0);
  REQUIRE(r);
  CHECK(*r == QuadraticNumber(0, 4, 7));
  r = exact_sqrt(QuadraticNumber(Rational(9, 4)), 5);
  REQUIRE(r);
  CHECK(*r == QuadraticNumber(Rational(3, 2)));
  // √2 is not in Q(√3).
  CHECK_FALSE(exact_sqrt(QuadraticNumber(2), 3));
  // 1 + √3 is not a square in Q(√3).
  CHECK_FALSE(exact_sqrt(QuadraticNumber(1, 1, 3), 3));
  CHECK_FALSE(exact_sqrt(QuadraticNumber(-1), 0));
}

TEST_CASE("exact_sqrt squares back") {
  for (int i = 0; i < 200; ++i) {
    const auto x = random_quadratic(7, 30);
    const auto sq = x * x;
    const auto r = exact_sqrt(sq, 7);
    REQUIRE(r);
    CHECK(*r * *r == sq);
    CHECK(r->sign() >= 0);
  }
}

TEST_CASE("parse and print") {
  CHECK(QuadraticNumber::parse("7-4√3") == QuadraticNumber(7, -4, 3));
  CHECK(QuadraticNumber::parse("7-4sqrt3") == QuadraticNumber(7, -4, 3));
  CHECK(QuadraticNumber::parse("-3/4") == QuadraticNumber(Rational(-3, 4)));
  CHECK(QuadraticNumber::parse("11/3-4/3√7") == QuadraticNumber(Rational(11, 3), Rational(-4, 3), 7));
  CHECK(QuadraticNumber::parse("√3") == sqrt3);
  CHECK(QuadraticNumber::parse("-√3") == -sqrt3);
  CHECK(QuadraticNumber::parse("sqrt(12)") == QuadraticNumber(0, 2, 3));
  CHECK_THROWS_AS(QuadraticNumber::parse(""), ParseError);
  CHECK_THROWS_AS(QuadraticNumber::parse("7-4√"), ParseError);
  CHECK_THROWS_AS(QuadraticNumber::parse("1/0"), ParseError);
  CHECK_THROWS_AS(QuadraticNumber::parse("√2+√3"), Error);
  CHECK_THROWS_AS(QuadraticNumber::parse("abc"), ParseError);

  CHECK(QuadraticNumber(7, -4, 3).to_string() == "7-4√3");
  CHECK(QuadraticNumber(Rational(5, 2)).to_string() == "5/2");
  for (int i = 0; i < 300; ++i) {
    const auto x = random_quadratic(std::vector<long>{2, 3, 7}[i % 3]);
    CHECK(QuadraticNumber::parse(x.to_string()) == x);
  }
}

TEST_CASE("to_float") {
  auto a = to_float(beta);
  CHECK(a.value == doctest::Approx(3.7320508075688772).epsilon(1e-16));
  CHECK(std::fabs(a.value - 3.7320508075688772935) <= a.error_bound);
  // Half an ulp of a double in [2, 4) plus the working error.
  CHECK(a.error_bound <= std::ldexp(1.0, -51));
  CHECK(a.decimal.rfind("3.73205080756887729", 0) == 0);

  a = to_float(QuadraticNumber(Rational(11, 3), Rational(-4, 3), 7));
  const long double oracle = (11.0L - 4.0L * std::sqrt(7.0L)) / 3.0L;
  CHECK(std::fabs(a.value - oracle) <= a.error_bound + 1e-18);
  CHECK(a.value == doctest::Approx(0.1389983).epsilon(1e-6));

  a = to_float(QuadraticNumber(Rational(5, 2)));
  CHECK(a.value == 2.5);
  CHECK(a.error_bound == 0.0);

  a = to_float(beta, 200);
  CHECK(a.decimal.rfind("3.7320508075688772935274463415058723669428", 0) == 0);
}

TEST_CASE("to_float respects sign") {
  for (int i = 0; i < 500; ++i) {
    // Nearly cancelling pairs a + b√d with a ≈ -b√d.
    const long p = testing::uniform(1, 10000), q = testing::uniform(1, 10000);
    const QuadraticNumber x(Rational(p), Rational(-q, 1), 2);
    for (unsigned bits : {24u, 53u, 100u}) {
      const auto f = to_float(x, bits);
      if (x.sign() > 0) CHECK(f.value > -std::ldexp(1.0, -static_cast<int>(bits)));
      if (x.sign() < 0) CHECK(f.value < std::ldexp(1.0, -static_cast<int>(bits)));
    }
  }
}
