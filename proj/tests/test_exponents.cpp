#include "lmw/exponents.hpp"

#include <random>

#include "doctest.h"

using namespace lmw::exponents;

namespace {
const ThetaValue kKS{Rational(7, 64), "Kim-Sarnak 2003"};
const ThetaValue kZero{Rational(0), "no exceptional eigenvalue"};
}  // namespace

TEST_CASE("rational square roots") {
  Rational r;
  CHECK(rational_sqrt(Rational(49, 4096), r));
  CHECK(r == Rational(7, 64));
  CHECK(rational_sqrt(Rational(0), r));
  CHECK(r == 0);
  CHECK(rational_sqrt(Rational(144, 169), r));
  CHECK(r == Rational(12, 13));
  CHECK(!rational_sqrt(Rational(1, 2), r));
  CHECK(!rational_sqrt(Rational(-1, 4), r));
}

TEST_CASE("theta from eigenvalue bounds") {
  CHECK(theta_from_lambda(Rational(975, 4096)).value == Rational(7, 64));
  CHECK(theta_from_lambda(Rational(1, 4)).value == 0);
  CHECK(theta_from_lambda(Rational(1, 2)).value == 0);  // clamped at 0
  CHECK(theta_from_lambda(Rational(3, 16)).value == Rational(1, 4));
  CHECK_THROWS(theta_from_lambda(Rational(1, 5)));   // 1/20 is not a square
  CHECK_THROWS(theta_from_lambda(Rational(-1, 16)));
}

TEST_CASE("monomial algebra") {
  Monomial a{Rational(1, 2), Rational(-1), 0, 0, 0, 0};
  Monomial b{Rational(1, 2), Rational(2), 0, 0, 0, 0};
  Monomial p = a * b;
  CHECK(p.l == 1);
  CHECK(p.q == 1);
  CHECK(pow(a, Rational(2)).l == 1);
  CHECK((a * a.inverse() == Monomial{}));
}

TEST_CASE("cutoff balance, exact branch exponents") {
  auto cb = balance_cutoff(kKS);
  CHECK(cb.branch1.l == Rational(-8, 57));
  CHECK(cb.branch1.q == Rational(32, 57));
  CHECK(cb.branch1.M == Rational(1, 2));
  CHECK(cb.branch1.N == Rational(3, 38));
  CHECK(cb.branch2.l == Rational(-8, 57));
  CHECK(cb.branch2.q == Rational(65, 57));

  auto cz = balance_cutoff(kZero);
  CHECK(cz.branch1.l == Rational(-1, 8));
  CHECK(cz.branch1.q == Rational(1, 2));
  CHECK(cz.branch1.M == Rational(1, 2));
  CHECK(cz.branch1.N == Rational(1, 8));
  CHECK(cz.branch2.q == Rational(9, 8));
}

TEST_CASE("error monomials and the headline decay exponent") {
  auto errs = moment_error_terms(kKS);
  REQUIRE(errs.size() == 3);
  CHECK(errs[0].q == Rational(-25, 228));
  CHECK(errs[0].l == Rational(139, 228));  // (5 - 6t)/(8 - 8t) at t = 7/64
  CHECK(errs[1].q == Rational(-1, 4));
  CHECK(errs[1].l == Rational(17, 8));
  CHECK(errs[2].q == Rational(-8, 57));
  CHECK(errs[2].l == Rational(73, 114));  // (5 - 4t)/(8 - 8t) at t = 7/64

  // at l = 1 the slowest decay is the first term
  Rational best = errs[0].q;
  for (const auto& e : errs) CHECK(e.q <= best);
}

TEST_CASE("re-derivation identities hold for 100 random rational theta") {
  std::mt19937_64 rng(29);
  int done = 0;
  while (done < 100) {
    long den = static_cast<long>(rng() % 4000) + 4;
    long num = static_cast<long>(rng() % static_cast<unsigned long>(den)) ;
    Rational t(num, 4 * den);  // in [0, 1/4)
    t.canonicalize();
    if (t >= Rational(1, 4)) continue;
    ThetaValue tv{t, "random"};
    CHECK_NOTHROW(balance_cutoff(tv));
    CHECK_NOTHROW(moment_error_terms(tv));
    done++;
  }
}

TEST_CASE("subconvexity saving") {
  auto r = subconvexity_delta(kKS);
  CHECK(r.delta == Rational(25, 3136));
  CHECK(r.amplifier_length_exponent == Rational(25, 392));
  CHECK(subconvexity_delta(kZero).delta == Rational(1, 112));
  CHECK_THROWS(subconvexity_delta(ThetaValue{Rational(7, 8), ""}));
}

TEST_CASE("delta is strictly decreasing in theta") {
  Rational prev = subconvexity_delta(kZero).delta;
  for (int i = 1; i <= 16; i++) {
    ThetaValue t{Rational(i, 64), ""};
    Rational d = subconvexity_delta(t).delta;
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("mollifier lengths and the recorded-value audit") {
  auto r = mollifier_lengths(kKS);
  CHECK(r.delta1_formula == Rational(25, 506));
  CHECK(r.delta1_constraints[1] == Rational(1, 21));
  CHECK(r.delta1_constraints[2] == Rational(4, 65));
  CHECK(r.delta1_min == Rational(1, 21));
  CHECK(r.delta2 == Rational(25, 784));
  // both audits fire: 25/506 != recorded 25/566, and 1/21 binds
  CHECK(r.flags.size() == 2);

  // monotone decreasing in theta
  Rational p1 = mollifier_lengths(kZero).delta1_formula;
  Rational p2 = mollifier_lengths(kZero).delta2;
  for (int i = 1; i <= 16; i++) {
    auto ri = mollifier_lengths(ThetaValue{Rational(i, 64), ""});
    CHECK(ri.delta1_formula < p1);
    CHECK(ri.delta2 < p2);
    p1 = ri.delta1_formula;
    p2 = ri.delta2;
  }
}

TEST_CASE("twist length thresholds and the dominance audit") {
  auto r = twist_length_thresholds(kKS);
  CHECK(r.stated_diagonal == Rational(16, 73));
  CHECK(r.stated_amplified == Rational(64, 691));
  CHECK(r.per_term[0] == Rational(25, 253));
  CHECK(r.per_term[1] == Rational(2, 21));
  CHECK(r.per_term[2] == Rational(8, 65));
  CHECK(r.per_term_min == Rational(2, 21));
  CHECK(r.flags.size() == 1);  // 64/691 vs 2/21
}

TEST_CASE("eigenvalue bound table") {
  auto rows = selberg_table();
  REQUIRE(rows.size() == 7);
  CHECK(rows[0].lambda1 == Rational(3, 16));
  CHECK(rows[0].theta == Rational(1, 4));
  CHECK(rows[1].theta == Rational(1, 4));
  CHECK(rows[2].lambda1 == Rational(171, 784));
  CHECK(rows[2].theta == Rational(5, 28));
  CHECK(rows[3].theta == Rational(3, 14));
  CHECK(rows[4].theta == Rational(5, 34));
  CHECK(rows[5].lambda1 == Rational(975, 4096));
  CHECK(rows[5].theta == Rational(7, 64));
  CHECK(rows[6].theta == 0);
  for (const auto& row : rows) CHECK(row.exact);
}
