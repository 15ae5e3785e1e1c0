#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "pellsmooth/cf.hpp"
#include "pellsmooth/infra.hpp"
#include "pellsmooth/quadint.hpp"
#include "pellsmooth/regulator.hpp"
#include "pellsmooth/util.hpp"

using namespace pellsmooth;

namespace {

bool squarefree_small(unsigned long n) {
    for (unsigned long p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

bool is_square(unsigned long n) {
    unsigned long r = static_cast<unsigned long>(std::sqrt(static_cast<double>(n)));
    for (unsigned long t = r > 1 ? r - 1 : 0; t <= r + 1; ++t)
        if (t * t == n) return true;
    return false;
}

}  // namespace

TEST_CASE("cf_expand on the classic small radicands") {
    auto cf2 = cf_expand(2);
    CHECK(cf2.a0 == 1);
    CHECK(cf2.l == 1);
    REQUIRE(cf2.period.size() == 1);
    CHECK(cf2.period[0] == 2);
    CHECK(cf2.complete);

    auto cf7 = cf_expand(7);
    CHECK(cf7.a0 == 2);
    CHECK(cf7.l == 4);
    REQUIRE(cf7.period.size() == 4);
    CHECK(cf7.period[0] == 1);
    CHECK(cf7.period[1] == 1);
    CHECK(cf7.period[2] == 1);
    CHECK(cf7.period[3] == 4);

    auto cf13 = cf_expand(13);
    CHECK(cf13.a0 == 3);
    CHECK(cf13.l == 5);
    REQUIRE(cf13.period.size() == 5);
    CHECK(cf13.period[0] == 1);
    CHECK(cf13.period[4] == 6);
}

TEST_CASE("cf_expand input validation and caps") {
    CHECK_THROWS_AS(cf_expand(1), usage_error);
    CHECK_THROWS_AS(cf_expand(49), usage_error);
    auto capped = cf_expand(94, 2);  // l(sqrt 94) = 16
    CHECK_FALSE(capped.complete);
    CHECK(capped.period.size() == 2);
}

TEST_CASE("cf_expand structural invariants over squarefree d <= 3000") {
    for (unsigned long n = 2; n <= 3000; ++n) {
        if (!squarefree_small(n) || is_square(n)) continue;
        auto cf = cf_expand(n);
        REQUIRE(cf.complete);
        // period closes at Q = 1 and the last quotient is 2*a0
        CHECK(cf.pq_seq.back().second == 1);
        CHECK(cf.period.back() == 2 * cf.a0);
        for (auto& [P, Q] : cf.pq_seq) CHECK(Q > 0);
        // palindrome
        for (std::size_t i = 0; i + 1 < cf.l; ++i)
            CHECK(cf.period[i] == cf.period[cf.l - 2 - i]);
    }
}

TEST_CASE("pell_fundamental examples") {
    auto s2 = pell_fundamental(2);
    CHECK(s2.x == 1);
    CHECK(s2.y == 1);
    CHECK(s2.norm == -1);

    auto s5 = pell_fundamental(5);
    CHECK(s5.x == 2);
    CHECK(s5.y == 1);
    CHECK(s5.norm == -1);

    auto s7 = pell_fundamental(7);
    CHECK(s7.x == 8);
    CHECK(s7.y == 3);
    CHECK(s7.norm == 1);
}

TEST_CASE("pell_fundamental minimality and parity link for squarefree d <= 400") {
    for (unsigned long n = 2; n <= 400; ++n) {
        if (!squarefree_small(n) || is_square(n)) continue;
        mpz_class d(n);
        auto s = pell_fundamental(d);
        CHECK(s.x * s.x - d * s.y * s.y == s.norm);
        CHECK((s.norm == -1) == (cf_expand(d).l % 2 == 1));
        // exhaustive minimality over smaller y (capped; y1 itself can be huge)
        mpz_class ycap = s.y - 1;
        if (ycap > 2000) ycap = 2000;
        for (mpz_class y = 1; y <= ycap; ++y) {
            mpz_class t = d * y * y + 1;
            CHECK_FALSE(mpz_perfect_square_p(t.get_mpz_t()));
            t = d * y * y - 1;
            if (t >= 1) CHECK_FALSE(mpz_perfect_square_p(t.get_mpz_t()));
        }
    }
}

TEST_CASE("fundamental_unit examples") {
    QuadInt u5 = fundamental_unit(5);
    CHECK(u5.a == 1);
    CHECK(u5.b == 1);
    CHECK(u5.s == 2);
    CHECK(u5.norm() == -1);

    QuadInt u2 = fundamental_unit(2);
    CHECK(u2.a == 1);
    CHECK(u2.b == 1);
    CHECK(u2.s == 1);
    CHECK(u2.norm() == -1);

    QuadInt u21 = fundamental_unit(21);
    CHECK(u21.a == 5);
    CHECK(u21.b == 1);
    CHECK(u21.s == 2);
    CHECK(u21.norm() == 1);
}

TEST_CASE("fundamental unit powers reach the Pell solution (squarefree d <= 300)") {
    for (unsigned long n = 2; n <= 300; ++n) {
        if (!squarefree_small(n) || is_square(n)) continue;
        mpz_class d(n);
        QuadInt eta = fundamental_unit(d);
        auto pell = pell_fundamental(d);
        // eta^m = x1 + y1 sqrt(d) for some m in {1, 2, 3, 6}
        bool hit = false;
        QuadInt p = QuadInt::one(d);
        for (int m = 1; m <= 6 && !hit; ++m) {
            p = p * eta;
            hit = (p.s == 1 && p.a == pell.x && p.b == pell.y);
        }
        CHECK(hit);
    }
}

TEST_CASE("regulator closed forms") {
    Regulator r2 = regulator(mpz_class(2));
    CHECK(r2.dvalue == doctest::Approx(std::log(1.0 + std::sqrt(2.0))).epsilon(1e-9));
    CHECK(std::fabs(r2.dvalue - 0.881374) < 1e-5);

    Regulator r5 = regulator(mpz_class(5));
    CHECK(r5.dvalue == doctest::Approx(std::log((1.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-9));
    CHECK(std::fabs(r5.dvalue - 0.481212) < 1e-5);
}

TEST_CASE("regulator agrees with the exact unit (squarefree d <= 1200)") {
    for (unsigned long n = 2; n <= 1200; ++n) {
        if (!squarefree_small(n) || is_square(n)) continue;
        mpz_class d(n);
        Regulator r = regulator(d);
        QuadInt eta = fundamental_unit(d);
        CHECK(std::fabs(r.dvalue - eta.log_approx()) < 1e-8);
        CHECK(r.abs_error_bound < 1e-8);
    }
}

TEST_CASE("bsgs path matches the plain cycle walk") {
    RegulatorOptions force;
    force.force_bsgs = true;
    for (unsigned long n : {1234567UL, 7654321UL, 99999999UL, 123456789UL}) {
        unsigned long m = n;
        while (!squarefree_small(m) || is_square(m)) ++m;
        mpz_class d(m);
        Regulator plain = regulator(d);
        Regulator bs = regulator(d, 0, force);
        CHECK(std::fabs(plain.dvalue - bs.dvalue) < 1e-6);
        CHECK(bs.method == Regulator::Method::bsgs);
    }
}

TEST_CASE("regulator honors the ceiling") {
    RegulatorOptions opts;
    opts.d_ceiling = 1000;
    CHECK_THROWS_AS(regulator(mpz_class(1003), 0, opts), limit_error);
}

TEST_CASE("convergents_up_to examples") {
    auto v = convergents_up_to_vec(2, 3);
    REQUIRE(v.size() == 2);
    CHECK(v[0].p == 1);
    CHECK(v[0].q == 1);
    CHECK(v[0].form_value == -1);
    CHECK(v[1].p == 3);
    CHECK(v[1].q == 2);
    CHECK(v[1].form_value == 1);

    auto v7 = convergents_up_to_vec(7, 4);
    REQUIRE(v7.size() == 4);
    CHECK(v7[0].p == 2);
    CHECK(v7[0].form_value == -3);
    CHECK(v7[1].p == 3);
    CHECK(v7[1].form_value == 2);
    CHECK(v7[2].p == 5);
    CHECK(v7[2].q == 2);
    CHECK(v7[2].form_value == -3);
    CHECK(v7[3].p == 8);
    CHECK(v7[3].q == 3);
    CHECK(v7[3].form_value == 1);

    CHECK(convergents_up_to_vec(5, 1).empty());
}

TEST_CASE("convergent norms match the signed Q sequence") {
    for (unsigned long n : {7UL, 13UL, 19UL, 94UL, 211UL}) {
        mpz_class d(n);
        auto cf = cf_expand(d);
        auto conv = convergents_up_to_vec(d, mpz_class(1) << 40);
        for (std::size_t i = 0; i + 1 < conv.size() && i < cf.pq_seq.size(); ++i) {
            // p_i^2 - d q_i^2 = (-1)^(i+1) Q_(i+1)
            mpz_class expect = cf.pq_seq[i].second;
            if (i % 2 == 0) expect = -expect;
            CHECK(conv[i].form_value == expect);
        }
    }
}

TEST_CASE("quad_mul_mod examples") {
    mpz_class d2(2), d5(5);
    auto r = quad_mul_mod({1, 1}, {1, 1}, d2, 5);
    CHECK(r.a == 3);
    CHECK(r.b == 2);

    r = quad_mul_mod({2, 1}, {2, -1}, d5, 7);
    CHECK(r.a == 6);  // norm -1 = 6 (mod 7)
    CHECK(r.b == 0);

    r = quad_mul_mod({38, 17}, {2, 1}, d5, 10);
    CHECK(r.a == 1);
    CHECK(r.b == 2);
}

TEST_CASE("half-period test and two_fundamental") {
    CHECK(half_period_two_test(7) == 2);
    auto nu7 = two_fundamental(7);
    CHECK(nu7.x == 3);
    CHECK(nu7.y == 1);
    CHECK(nu7.norm == 2);

    CHECK(half_period_two_test(3) == -2);
    auto nu3 = two_fundamental(3);
    CHECK(nu3.x == 1);
    CHECK(nu3.y == 1);
    CHECK(nu3.norm == -2);

    CHECK(half_period_two_test(5) == 0);
    CHECK(half_period_two_test(11) == -2);
}

TEST_CASE("quadint sanity") {
    QuadInt g(1, 1, 2, mpz_class(5));
    QuadInt g2 = g * g;
    CHECK(g2.a == 3);
    CHECK(g2.b == 1);
    CHECK(g2.s == 2);
    QuadInt g6 = g.pow(6);
    CHECK(g6.s == 1);
    CHECK(g6.a == 9);
    CHECK(g6.b == 4);
    CHECK(g6.norm() == 1);
    CHECK_THROWS_AS(QuadInt(1, 0, 2, mpz_class(7)), math_error);
}
