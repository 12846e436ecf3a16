#include <catch_amalgamated.hpp>

#include <rlab/rational.hpp>
#include <rlab/errors.hpp>

#include <cmath>
#include <random>

using rlab::Rational;

TEST_CASE("parse normalizes and rejects junk", "[rational]") {
  CHECK(Rational::parse("3/6") == Rational(1, 2));
  CHECK(Rational::parse("-4/8") == Rational(-1, 2));
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational::parse("0/5").is_zero());
  for (const char* bad : {"", "1/0", "abc", "1/", "/2", "1.5", "2/3/4"}) {
    INFO(bad);
    CHECK_THROWS_AS(Rational::parse(bad), rlab::Error);
  }
}

TEST_CASE("pow2 and ordering", "[rational]") {
  CHECK(Rational::pow2(-3) == Rational(1, 8));
  CHECK(Rational::pow2(4) == Rational(16));
  CHECK(Rational::pow2(0) == Rational(1));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(-1, 3));
  CHECK(Rational(-2, 3).abs() == Rational(2, 3));
  CHECK(Rational(-2, 3).sign() == -1);
}

TEST_CASE("SplitSum matches naive accumulation", "[rational]") {
  // H_10 = 7381/2520
  rlab::SplitSum s;
  for (unsigned long n = 1; n <= 10; ++n) s.add(1, n);
  CHECK(s.take() == Rational(7381, 2520));
  CHECK(s.empty());

  std::mt19937_64 rng(42);
  for (int round = 0; round < 20; ++round) {
    rlab::SplitSum ss;
    Rational naive;
    int count = static_cast<int>(rng() % 300);
    for (int i = 0; i < count; ++i) {
      long num = static_cast<long>(rng() % 2001) - 1000;
      unsigned long den = 1 + rng() % 997;
      Rational t(num, den);
      naive += t;
      if (i % 2) ss.add(t);
      else ss.add(num, den);
    }
    CHECK(ss.take() == naive);
  }
}

TEST_CASE("two_sum is error free", "[rational][dd]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    double a = u(rng), b = u(rng) * 1e-9;
    auto d = rlab::two_sum(a, b);
    Rational lhs = Rational(mpq_class(d.hi)) + Rational(mpq_class(d.lo));
    Rational rhs = Rational(mpq_class(a)) + Rational(mpq_class(b));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("double-double reciprocal and conversion are accurate to 2^-100", "[rational][dd]") {
  for (std::uint64_t d : {1ULL, 3ULL, 7ULL, 10ULL, 12345ULL, 999983ULL, 1ULL << 40}) {
    auto r = rlab::dd_reciprocal(d);
    Rational err = (Rational(mpq_class(r.hi)) + Rational(mpq_class(r.lo)) -
                    Rational(mpz_class(1), mpz_class(std::to_string(d))))
                       .abs();
    INFO(d);
    CHECK(err <= Rational::pow2(-100) * Rational(mpz_class(1), mpz_class(std::to_string(d))));
  }
  Rational x = Rational::parse("123456789/987654321");
  auto dd = rlab::to_dd(x);
  Rational err = (Rational(mpq_class(dd.hi)) + Rational(mpq_class(dd.lo)) - x).abs();
  CHECK(err <= Rational::pow2(-100));
}

TEST_CASE("dd_add tracks a long harmonic sum", "[rational][dd]") {
  rlab::DD s{};
  rlab::SplitSum exact;
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    s = rlab::dd_add(s, rlab::dd_reciprocal(n));
    exact.add(1, n);
  }
  Rational e = exact.take();
  Rational err = (Rational(mpq_class(s.hi)) + Rational(mpq_class(s.lo)) - e).abs();
  CHECK(err < Rational::pow2(-80));
  CHECK(std::fabs(s.value() - (std::log(5000.0) + 0.5772156649015329)) < 1e-4);
}

TEST_CASE("Budget charges and throws the configured kind", "[errors]") {
  rlab::Budget b(10, rlab::ErrorKind::SearchBudgetExceeded);
  b.charge(10);
  CHECK(b.used() == 10);
  try {
    b.charge();
    FAIL("expected a throw");
  } catch (const rlab::Error& e) {
    CHECK(e.kind() == rlab::ErrorKind::SearchBudgetExceeded);
  }
}
