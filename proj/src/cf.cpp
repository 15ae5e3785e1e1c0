#include "pellsmooth/cf.hpp"

#include "pellsmooth/util.hpp"

namespace pellsmooth {

namespace {

void require_radicand(const mpz_class& d) {
    if (d < 2) throw usage_error("radicand must be >= 2, got " + d.get_str());
    if (mpz_perfect_square_p(d.get_mpz_t()))
        throw usage_error("radicand must not be a perfect square, got " + d.get_str());
}

}  // namespace

CFExpansion cf_expand(const mpz_class& d, std::size_t step_cap) {
    require_radicand(d);
    CFExpansion cf;
    cf.d = d;
    mpz_sqrt(cf.a0.get_mpz_t(), d.get_mpz_t());

    mpz_class P = 0, Q = 1, a = cf.a0, Pn, Qn;
    for (std::size_t i = 1; i <= step_cap; ++i) {
        Pn = a * Q - P;
        Qn = (d - Pn * Pn) / Q;
        a = (Pn + cf.a0) / Qn;
        cf.period.push_back(a);
        cf.pq_seq.emplace_back(Pn, Qn);
        P = Pn;
        Q = Qn;
        if (Q == 1) {
            cf.l = i;
            cf.complete = true;
            return cf;
        }
    }
    cf.l = cf.period.size();
    cf.complete = false;
    return cf;
}

PellSolution pell_fundamental(const mpz_class& d, std::size_t step_cap) {
    require_radicand(d);
    mpz_class a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());

    // Convergent recurrence alongside the (P, Q) walk; (p_{l-1}, q_{l-1}) is
    // the answer, with norm (-1)^l.
    mpz_class P = 0, Q = 1, a = a0;
    mpz_class pm1 = 1, p = a0, qm1 = 0, q = 1;
    for (std::size_t i = 1; i <= step_cap; ++i) {
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        if (Q == 1) return {p, q, (i % 2 == 1) ? -1 : +1};
        a = (P + a0) / Q;
        mpz_class pn = a * p + pm1;
        mpz_class qn = a * q + qm1;
        pm1 = p;
        p = pn;
        qm1 = q;
        q = qn;
    }
    throw limit_error("pell_fundamental: period exceeds step cap for d = " + d.get_str());
}

QuadInt fundamental_unit(const mpz_class& d, std::size_t step_cap) {
    require_radicand(d);
    if (d % 4 != 1) {
        PellSolution s = pell_fundamental(d, step_cap);
        return QuadInt(s.x, s.y, 1, d);
    }

    // Maximal order with odd discriminant: expand w = (1 + sqrt(d))/2. The
    // complete quotients cycle from index 1 on; with p_i/q_i the convergents
    // of w and l the period, eta = ((2 p_{l-1} - q_{l-1}) + q_{l-1} sqrt d)/2.
    mpz_class a0w;
    {
        mpz_class t;
        mpz_sqrt(t.get_mpz_t(), d.get_mpz_t());
        a0w = (1 + t) / 2;
    }
    mpz_class sq;
    mpz_sqrt(sq.get_mpz_t(), d.get_mpz_t());

    mpz_class P = 1, Q = 2;
    mpz_class a = a0w;
    mpz_class pm1 = 1, p = a0w, qm1 = 0, q = 1;
    mpz_class P1, Q1;
    for (std::size_t i = 1; i <= step_cap; ++i) {
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        if (i == 1) {
            P1 = P;
            Q1 = Q;
        } else if (P == P1 && Q == Q1) {
            // period closed at l = i - 1; the convergents p_{l-1}, q_{l-1}
            // are the previous pair (p, q already absorbed a_l)
            return QuadInt(2 * pm1 - qm1, qm1, 2, d);
        }
        a = (P + sq) / Q;
        mpz_class pn = a * p + pm1;
        mpz_class qn = a * q + qm1;
        pm1 = p;
        p = pn;
        qm1 = q;
        q = qn;
    }
    throw limit_error("fundamental_unit: period exceeds step cap for d = " + d.get_str());
}

void convergents_up_to(const mpz_class& d, const mpz_class& z,
                       const std::function<bool(const Convergent&)>& emit) {
    require_radicand(d);
    if (z < 1) return;
    mpz_class a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());

    mpz_class P = 0, Q = 1, a = a0;
    mpz_class pm1 = 1, p = a0, qm1 = 0, q = 1;
    while (q < z) {
        if (!emit({p, q, p * p - d * q * q})) return;
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        a = (P + a0) / Q;
        mpz_class pn = a * p + pm1;
        mpz_class qn = a * q + qm1;
        pm1 = p;
        p = pn;
        qm1 = q;
        q = qn;
    }
}

std::vector<Convergent> convergents_up_to_vec(const mpz_class& d, const mpz_class& z) {
    std::vector<Convergent> out;
    convergents_up_to(d, z, [&](const Convergent& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

int half_period_two_test(const mpz_class& d, std::size_t step_cap) {
    require_radicand(d);
    PS_CHECK(d != 2, "half_period_two_test: d = 2 is a special family");
    mpz_class a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());

    // Walk one period; record whether Q hits 2 and at which index. For even l
    // the midpoint Q_{l/2} == 2 decides solvability with sign (-1)^{l/2}.
    mpz_class P = 0, Q = 1, a = a0;
    std::size_t two_at = 0;
    for (std::size_t i = 1; i <= step_cap; ++i) {
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        if (Q == 2 && two_at == 0) two_at = i;
        if (Q == 1) {
            std::size_t l = i;
            if (l % 2 != 0 || two_at != l / 2) return 0;
            return (l / 2) % 2 == 0 ? +2 : -2;
        }
        a = (P + a0) / Q;
    }
    throw limit_error("half_period_two_test: period exceeds step cap for d = " + d.get_str());
}

PellSolution two_fundamental(const mpz_class& d, std::size_t step_cap) {
    require_radicand(d);
    PS_CHECK(d != 2, "two_fundamental: d = 2 is a special family");
    mpz_class a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());

    mpz_class P = 0, Q = 1, a = a0;
    mpz_class pm1 = 1, p = a0, qm1 = 0, q = 1;
    for (std::size_t i = 1; i <= step_cap; ++i) {
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        if (Q == 2) {
            // p, q currently hold (p_{i-1}, q_{i-1}); norm is (-1)^i * 2.
            mpz_class n = p * p - d * q * q;
            PS_CHECK(n == 2 || n == -2, "two_fundamental: midpoint convergent has wrong norm");
            return {p, q, static_cast<int>(n.get_si())};
        }
        if (Q == 1)
            throw math_error("two_fundamental: no norm +-2 ideal in the principal cycle of d = " +
                             d.get_str());
        a = (P + a0) / Q;
        mpz_class pn = a * p + pm1;
        mpz_class qn = a * q + qm1;
        pm1 = p;
        p = pn;
        qm1 = q;
        q = qn;
    }
    throw limit_error("two_fundamental: period exceeds step cap for d = " + d.get_str());
}

}  // namespace pellsmooth
