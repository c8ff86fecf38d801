#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "kll/oracle.hpp"

using namespace kll;

namespace {

Q35 random_q35(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-12, 12);
  std::uniform_int_distribution<long> den(1, 9);
  Q35 v;
  v.q1 = Rational(num(rng)) / den(rng);
  v.q3 = Rational(num(rng)) / den(rng);
  v.q5 = Rational(num(rng)) / den(rng);
  v.q15 = Rational(num(rng)) / den(rng);
  return v;
}

}  // namespace

TEST_CASE("Q35 ring axioms (randomized, exact)") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    Q35 a = random_q35(rng), b = random_q35(rng), c = random_q35(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + (b + c) == (a + b) + c);
    CHECK(a - a == Q35());
    if (!a.is_zero()) {
      CHECK(a * a.inverse() == Q35::rat(1));
      CHECK((a / a) == Q35::rat(1));
    }
  }
  // radical multiplication table
  CHECK(Q35::sqrt3() * Q35::sqrt5() == Q35::sqrt15());
  CHECK(Q35::sqrt3() * Q35::sqrt15() == Q35::sqrt5(3));
  CHECK(Q35::sqrt5() * Q35::sqrt15() == Q35::sqrt3(5));
  CHECK(Q35::sqrt15() * Q35::sqrt15() == Q35::rat(15));
  CHECK(Q35::sqrt3() * Q35::sqrt3() == Q35::rat(3));
}

TEST_CASE("monomial moments") {
  CHECK(monomial_moment({0, 0, 0}) == Rational(1));
  CHECK(monomial_moment({4, 0, 0}) == Rational(1) / 80);
  CHECK(monomial_moment({2, 2, 0}) == Rational(1) / 144);
  CHECK(monomial_moment({1, 2, 0}) == Rational(0));
  CHECK(monomial_moment({3, 1, 1}) == Rational(0));
  CHECK(monomial_moment({2, 0, 0}) == Rational(1) / 12);
  CHECK(monomial_moment({6, 0, 0}) == Rational(1) / 448);
  CHECK(monomial_moment({8, 0, 0}) == Rational(1) / 2304);
}

TEST_CASE("poly_moment: linearity and agreement with monomial_moment") {
  VPolynomial p = VPolynomial::variable(0).pow(2) * VPolynomial::variable(1).pow(2);
  CHECK(poly_moment(p) == Q35(monomial_moment({2, 2, 0})));
  VPolynomial q = p.scaled(Q35::sqrt3(7)) + VPolynomial::constant(Q35::rat(1, 2));
  Q35 want = Q35::sqrt3(Rational(7) / 144) + Q35::rat(1, 2);
  CHECK(poly_moment(q) == want);
}

TEST_CASE("named bracket values") {
  CHECK(poly_moment(B_limit(0) * B_limit(0)) == Q35::rat(97, 75600));
  CHECK(poly_moment(VPolynomial::variable(0).pow(2) * vsq_limit()) == Q35::rat(19, 720));
  // the summed quadratic weight has squared norm 3, not 1
  CHECK(poly_moment(e2_limit() * e2_limit()) == Q35::rat(3));
  CHECK(poly_moment(e2_limit()) == Q35());
  CHECK(poly_moment(e1_limit(0) * e1_limit(0)) == Q35::rat(1));
  CHECK(poly_moment(e1_limit(0) * e1_limit(1)) == Q35());
  CHECK(poly_moment(e2_limit().pow(4)) == Q35::rat(171, 7));
  CHECK(poly_moment(e2_limit().pow(3)) == Q35::sqrt5(Rational(6) / 7));
  CHECK(poly_moment(e1_limit(1).pow(4)) == Q35::rat(9, 5));
}

TEST_CASE("verify_closure_tables: every row exact, flags documented") {
  OracleReport rep = verify_closure_tables();
  CHECK(rep.all_pass);
  CHECK(rep.n_fail == 0);
  CHECK(rep.n_flag == 2);  // the two documented quoted-table inconsistencies
  for (const auto& row : rep.rows) {
    if (row.status == RowStatus::Pass) CHECK(row.computed == row.expected);
    if (row.status == RowStatus::Flag) {
      CHECK(row.computed != row.expected);
      CHECK(!row.note.empty());
    }
  }
  // spot-check specific rows
  auto find = [&](const std::string& sym) -> const OracleRow* {
    for (const auto& r : rep.rows)
      if (r.symbol == sym) return &r;
    return nullptr;
  };
  const OracleRow* b2 = find("<B_i^2>");
  REQUIRE(b2 != nullptr);
  CHECK(b2->computed == Q35::rat(97, 75600));
  const OracleRow* e24 = find("<e2^4>");
  REQUIRE(e24 != nullptr);
  CHECK(e24->computed == Q35::rat(171, 7));
  const OracleRow* tilde = find("tilde diffusion / nu");
  REQUIRE(tilde != nullptr);
  CHECK(tilde->computed == Q35::rat(291, 133));
  const OracleRow* signed_grad = find("grad |u|^2 coeff (signed)");
  REQUIRE(signed_grad != nullptr);
  CHECK(signed_grad->computed == Q35::rat(-1, 45));
  CHECK(signed_grad->status == RowStatus::Flag);
  const OracleRow* quoted_grad = find("grad |u|^2 coeff (as quoted)");
  REQUIRE(quoted_grad != nullptr);
  CHECK(quoted_grad->status == RowStatus::Pass);
  CHECK(quoted_grad->computed == Q35::rat(2, 5));
}

TEST_CASE("csv report shape") {
  OracleReport rep = verify_closure_tables();
  std::string csv = oracle_report_csv(rep);
  CHECK(csv.find("lemma,symbol,expected,computed,pass,note") == 0);
  CHECK(csv.find("97/75600") != std::string::npos);
  CHECK(csv.find("291/133") != std::string::npos);
}
