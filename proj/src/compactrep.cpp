#include "pellsmooth/compactrep.hpp"

#include <cmath>
#include <sstream>

#include "pellsmooth/util.hpp"

namespace pellsmooth {

void assert_size_bounds(const CompactRep& rep) {
    mpz_class bound = rep.d * rep.d;
    bound <<= 20;
    if (bound < (mpz_class(1) << 24)) bound = mpz_class(1) << 24;
    for (const CompactTerm& t : rep.terms) {
        PS_CHECK(abs(t.a) <= bound && abs(t.b) <= bound && t.dj >= 1 && t.dj <= bound,
                 "compact representation term exceeds the size bound");
    }
}

namespace {

CompactRep finish_rep(const FieldCtx& ctx, std::vector<CompactTerm> terms, const Real& ln_target) {
    CompactRep rep;
    rep.d = ctx.d;
    rep.terms = std::move(terms);
    rep.target_log = ln_target;
    rep.target_log_d = mpfr_get_d(ln_target.get(), MPFR_RNDN);
    assert_size_bounds(rep);
    return rep;
}

}  // namespace

CompactRep build_compact(const FieldCtx& ctx, const Regulator& reg) {
    PS_CHECK(reg.d == ctx.d, "build_compact: regulator is for a different radicand");
    if (reg.abs_error_bound > 0.05)
        throw math_error("build_compact: insufficient regulator precision for d = " +
                         ctx.d.get_str());
    std::vector<CompactTerm> terms;
    if (reg.unit_terms)
        terms = *reg.unit_terms;
    else
        terms = doubling_walk(ctx, reg.dvalue, origin_ideal(ctx));
    return finish_rep(ctx, std::move(terms), reg.value);
}

CompactRep build_compact(const mpz_class& d, const Regulator& reg) {
    FieldCtx ctx(d);
    return build_compact(ctx, reg);
}

CompactRep build_compact_nu(const FieldCtx& ctx, const Regulator& reg) {
    PS_CHECK(reg.d == ctx.d, "build_compact_nu: regulator is for a different radicand");
    PS_CHECK(ctx.sigma == 1 && ctx.d > 2, "build_compact_nu: d must be 2,3 (mod 4), d != 2");
    double dist = 0.5 * (reg.dvalue + std::log(2.0));
    std::vector<CompactTerm> terms = doubling_walk(ctx, dist, norm_two_ideal(ctx));
    Real ln_nu(reg.value.prec());
    mpfr_const_log2(ln_nu.get(), MPFR_RNDN);
    mpfr_add(ln_nu.get(), ln_nu.get(), reg.value.get(), MPFR_RNDN);
    mpfr_mul_2si(ln_nu.get(), ln_nu.get(), -1, MPFR_RNDN);
    return finish_rep(ctx, std::move(terms), ln_nu);
}

namespace {

// Pull out of `x` every factor sharing a prime with `kernel`; returns the
// extracted part.
mpz_class extract_kernel_part(mpz_class& x, const mpz_class& kernel) {
    mpz_class part = 1, g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), kernel.get_mpz_t());
    while (g > 1) {
        part *= g;
        x /= g;
        mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    }
    return part;
}

struct WPair {
    mpz_class a, b;
};

// w <- w^2 * (ta + tb sqrt d) mod m
void step_mod(WPair& w, const mpz_class& ta, const mpz_class& tb, const mpz_class& d,
              const mpz_class& m) {
    mpz_class a2 = (w.a * w.a + d * w.b % m * w.b) % m;
    mpz_class b2 = (2 * w.a * w.b) % m;
    w.a = (a2 * ta + d * b2 % m * tb) % m;
    w.b = (a2 * tb + b2 * ta) % m;
    if (w.a < 0) w.a += m;
    if (w.b < 0) w.b += m;
}

mpz_class inv_mod(const mpz_class& x, const mpz_class& m, const char* what) {
    mpz_class r;
    if (!mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()))
        throw math_error(std::string("eval_mod: ") + what + " not invertible");
    return r;
}

}  // namespace

EvalResult eval_mod(const CompactRep& rep, const mpz_class& m) {
    PS_CHECK(m >= 2, "eval_mod: modulus must be >= 2");
    const mpz_class& d = rep.d;
    const std::size_t k = rep.k();

    unsigned long v2m = mpz_even_p(m.get_mpz_t()) ? mpz_scan1(m.get_mpz_t(), 0) : 0;
    mpz_class modd = m >> v2m;

    // Split the odd part of m into the piece sharing primes with some d_j
    // ("bad") and the coprime remainder.
    mpz_class m_good = modd, m_bad = 1;
    for (const CompactTerm& t : rep.terms) {
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), m_good.get_mpz_t(), t.dj.get_mpz_t());
        while (g > 1) {
            m_bad *= extract_kernel_part(m_good, g);
            mpz_gcd(g.get_mpz_t(), m_good.get_mpz_t(), t.dj.get_mpz_t());
        }
        if (m_good == 1) break;
    }

    // Track w_j = 2 * theta_j; w_j = w_{j-1}^2 * (a_j + b_j sqrt d) / (4 d_j),
    // an exact division inside Z[sqrt d].

    // Lane 1: coprime odd part, divisions become inverse multiplications.
    WPair wg{2 % m_good, 0};
    if (m_good > 1) {
        for (const CompactTerm& t : rep.terms) {
            step_mod(wg, t.a % m_good, t.b % m_good, d, m_good);
            mpz_class inv = inv_mod(4 * t.dj % m_good, m_good, "denominator");
            wg.a = wg.a * inv % m_good;
            wg.b = wg.b * inv % m_good;
        }
    }

    // Lane 2: odd part sharing primes with the d_j. Work modulo
    // m_bad * prod(bad part of d_j); each exact division shrinks the modulus
    // by exactly its bad factor, ending at m_bad.
    WPair wb{0, 0};
    std::vector<std::pair<mpz_class, unsigned long>> cleared;
    unsigned long two_cleared = 0;
    if (m_bad > 1) {
        std::vector<mpz_class> bad_parts(k), good_parts(k);
        mpz_class M = m_bad;
        for (std::size_t j = 0; j < k; ++j) {
            mpz_class dj = rep.terms[j].dj;
            bad_parts[j] = extract_kernel_part(dj, m_bad);
            good_parts[j] = dj;
            M *= bad_parts[j];
            if (mpz_sizeinbase(M.get_mpz_t(), 2) > 1u << 22)
                throw math_error("eval_mod: valuation overflow clearing denominators for modulus " +
                                 m.get_str());
        }
        wb = {2 % M, 0};
        mpz_class Mcur = M;
        for (std::size_t j = 0; j < k; ++j) {
            const CompactTerm& t = rep.terms[j];
            step_mod(wb, t.a % Mcur, t.b % Mcur, d, Mcur);
            mpz_class inv = inv_mod(4 * good_parts[j] % Mcur, Mcur, "denominator (coprime part)");
            wb.a = wb.a * inv % Mcur;
            wb.b = wb.b * inv % Mcur;
            const mpz_class& bj = bad_parts[j];
            if (bj > 1) {
                if (wb.a % bj != 0 || wb.b % bj != 0)
                    throw math_error("eval_mod: valuation overflow at denominator block " +
                                     bj.get_str());
                wb.a /= bj;
                wb.b /= bj;
                Mcur /= bj;
                PS_CHECK(Mcur % m_bad == 0, "eval_mod: modulus budget exhausted");
            }
        }
        wb.a %= m_bad;
        wb.b %= m_bad;
    }

    // Lane 3: powers of two; divisions by 4 d_j consume headroom from an
    // enlarged 2-power modulus. Only needed for even m.
    int two_val = 0;
    mpz_class A2 = 0, B2 = 0;
    {
        unsigned long budget = 0;
        std::vector<unsigned long> v2dj(k);
        for (std::size_t j = 0; j < k; ++j) {
            v2dj[j] = mpz_even_p(rep.terms[j].dj.get_mpz_t())
                          ? mpz_scan1(rep.terms[j].dj.get_mpz_t(), 0)
                          : 0;
            budget += 2 + v2dj[j];
        }
        two_cleared = budget;
        if (v2m > 0) {
            WPair w2{2, 0};
            unsigned long Ecur = v2m + 1 + budget;
            for (std::size_t j = 0; j < k; ++j) {
                const CompactTerm& t = rep.terms[j];
                mpz_class M2 = mpz_class(1) << Ecur;
                step_mod(w2, t.a % M2, t.b % M2, d, M2);
                unsigned long shift = 2 + v2dj[j];
                if ((w2.a != 0 && mpz_scan1(w2.a.get_mpz_t(), 0) < shift) ||
                    (w2.b != 0 && mpz_scan1(w2.b.get_mpz_t(), 0) < shift))
                    throw math_error("eval_mod: valuation overflow at prime 2");
                w2.a >>= shift;
                w2.b >>= shift;
                Ecur -= shift;
                mpz_class M2c = mpz_class(1) << Ecur;
                mpz_class inv = inv_mod(rep.terms[j].dj >> v2dj[j], M2c, "odd denominator part");
                w2.a = w2.a * inv % M2c;
                w2.b = w2.b * inv % M2c;
            }
            PS_CHECK(Ecur == v2m + 1, "eval_mod: 2-adic budget mismatch");
            mpz_class m2 = mpz_class(1) << v2m;
            if (mpz_even_p(w2.a.get_mpz_t()) && mpz_even_p(w2.b.get_mpz_t())) {
                two_val = 0;
                A2 = (w2.a >> 1) % m2;
                B2 = (w2.b >> 1) % m2;
            } else {
                two_val = 1;
                A2 = w2.a % m2;
                B2 = w2.b % m2;
            }
        }
    }
    if (two_val == 0) two_cleared += 1;

    // Normalize the odd lanes to the quantity the 2-lane reports: beta when
    // two_val = 0, w = 2*beta when two_val = 1. Then CRT the three lanes.
    WPair g = wg, b = wb;
    if (two_val == 0) {
        if (m_good > 1) {
            mpz_class i2 = inv_mod(2, m_good, "two");
            g.a = g.a * i2 % m_good;
            g.b = g.b * i2 % m_good;
        }
        if (m_bad > 1) {
            mpz_class i2 = inv_mod(2, m_bad, "two");
            b.a = b.a * i2 % m_bad;
            b.b = b.b * i2 % m_bad;
        }
    }
    EvalResult out;
    {
        mpz_class res_a = 0, res_b = 0, mod = 1;
        auto crt2 = [&](const mpz_class& ra, const mpz_class& rb, const mpz_class& q) {
            if (q == 1) return;
            if (mod == 1) {
                res_a = ra % q;
                res_b = rb % q;
                mod = q;
                return;
            }
            mpz_class minv = inv_mod(mod % q, q, "CRT");
            mpz_class t = (ra - res_a) % q * minv % q;
            if (t < 0) t += q;
            res_a += mod * t;
            t = (rb - res_b) % q * minv % q;
            if (t < 0) t += q;
            res_b += mod * t;
            mod *= q;
        };
        crt2(g.a, g.b, m_good);
        crt2(b.a, b.b, m_bad);
        if (v2m > 0) crt2(A2, B2, mpz_class(1) << v2m);
        out.A = res_a;
        out.B = res_b;
        out.two_val = two_val;
    }

    out.cleared.emplace_back(2, two_cleared);
    if (m_bad > 1) {
        // Per-prime report where m_bad factors over small primes.
        mpz_class rem = m_bad;
        for (std::uint32_t p = 3; p < 1000000 && rem > 1; p += 2) {
            if (!mpz_divisible_ui_p(rem.get_mpz_t(), p)) continue;
            while (mpz_divisible_ui_p(rem.get_mpz_t(), p))
                mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
            unsigned long tot = 0;
            for (const CompactTerm& t : rep.terms) {
                mpz_class dj = t.dj;
                while (mpz_divisible_ui_p(dj.get_mpz_t(), p)) {
                    mpz_divexact_ui(dj.get_mpz_t(), dj.get_mpz_t(), p);
                    ++tot;
                }
            }
            out.cleared.emplace_back(p, tot);
        }
        if (rem > 1) {
            unsigned long tot = 0;
            for (const CompactTerm& t : rep.terms) {
                mpz_class dj = t.dj, g;
                mpz_gcd(g.get_mpz_t(), dj.get_mpz_t(), rem.get_mpz_t());
                while (g > 1) {
                    dj /= g;
                    ++tot;
                    mpz_gcd(g.get_mpz_t(), dj.get_mpz_t(), g.get_mpz_t());
                }
            }
            out.cleared.emplace_back(rem, tot);
        }
    }
    return out;
}

QuadInt expand_exact(const CompactRep& rep, std::size_t digit_cap) {
    double digits = rep.target_log_d / std::log(10.0);
    if (digits > static_cast<double>(digit_cap))
        throw limit_error("expand_exact: result would have ~" +
                          std::to_string(static_cast<long long>(digits)) +
                          " digits, beyond the configured cap");
    const mpz_class& d = rep.d;
    mpz_class wa = 2, wb = 0;
    for (const CompactTerm& t : rep.terms) {
        mpz_class a2 = wa * wa + d * wb * wb;
        mpz_class b2 = 2 * wa * wb;
        mpz_class na = a2 * t.a + d * b2 * t.b;
        mpz_class nb = a2 * t.b + b2 * t.a;
        mpz_class den = 4 * t.dj;
        PS_CHECK(na % den == 0 && nb % den == 0, "expand_exact: corrupt chain (division fails)");
        wa = na / den;
        wb = nb / den;
    }
    if (mpz_even_p(wa.get_mpz_t()) && mpz_even_p(wb.get_mpz_t()))
        return QuadInt(wa >> 1, wb >> 1, 1, d);
    return QuadInt(wa, wb, 2, d);
}

Real log_value(const CompactRep& rep, int precision_bits) {
    FieldCtx ctx(rep.d);
    mpfr_prec_t prec = precision_bits + static_cast<int>(rep.k()) + 64;
    return terms_log(ctx, rep.terms, prec);
}

std::string serialize(const CompactRep& rep) {
    std::ostringstream os;
    os << rep.d.get_str() << ' ' << rep.k() << '\n';
    for (const CompactTerm& t : rep.terms)
        os << t.a.get_str() << ' ' << t.b.get_str() << ' ' << t.dj.get_str() << '\n';
    return os.str();
}

CompactRep parse_compact(const std::string& text, int precision_bits) {
    std::istringstream is(text);
    std::string ds;
    std::size_t k = 0;
    if (!(is >> ds >> k)) throw usage_error("parse_compact: malformed header");
    CompactRep rep;
    rep.d = mpz_class(ds);
    if (rep.d < 2) throw usage_error("parse_compact: bad radicand");
    rep.terms.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::string a, b, dj;
        if (!(is >> a >> b >> dj)) throw usage_error("parse_compact: truncated term list");
        rep.terms[j] = {mpz_class(a), mpz_class(b), mpz_class(dj)};
        if (rep.terms[j].dj < 1) throw usage_error("parse_compact: nonpositive denominator");
    }
    rep.target_log = log_value(rep, precision_bits);
    rep.target_log_d = rep.target_log.to_double();
    return rep;
}

}  // namespace pellsmooth
