#include "pellsmooth/smoothness.hpp"

#include <cmath>

#include "pellsmooth/primes.hpp"
#include "pellsmooth/util.hpp"

namespace pellsmooth {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Valuation of a nonzero residue r (known modulo q^e with r != 0): since the
// residue is nonzero, v_q(Y) = v_q(r).
unsigned residue_valuation(mpz_class r, std::uint64_t q) {
    unsigned v = 0;
    while (mpz_divisible_ui_p(r.get_mpz_t(), static_cast<unsigned long>(q))) {
        mpz_divexact_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(q));
        ++v;
    }
    return v;
}

mpz_class pow_u64(std::uint64_t q, unsigned e) {
    mpz_class m;
    mpz_ui_pow_ui(m.get_mpz_t(), static_cast<unsigned long>(q), e);
    return m;
}

}  // namespace

unsigned valuation_probe(const FamilySource& src, unsigned long member, std::uint64_t q,
                         unsigned e_cap) {
    PS_CHECK(e_cap >= 1, "valuation_probe: e_cap must be >= 1");
    unsigned e = 4;
    for (;;) {
        if (e > e_cap + 4) e = e_cap + 4;
        mpz_class m = pow_u64(q, e);
        mpz_class y = term_mod(src, src.fam->record_index(member), m).second;
        if (y != 0) return residue_valuation(y, q);
        if (e >= e_cap + 4)
            throw math_error("valuation_probe: exponent cap hit at q = " + std::to_string(q) +
                             " (precision bug)");
        e *= 2;
    }
}

double member_y_size_log(const EquationFamily& f, double reg_value, unsigned long member) {
    // Y = (V - V')/(2 sqrt d) with V the member value and V' its conjugate,
    // |V'| = |N|/|V|.
    double dd = mpz_get_d(f.d.get_mpz_t());
    double log_2sqrtd = kLn2 + 0.5 * std::log(dd);
    unsigned long E = f.eta_exponent(member);
    double log_v;
    double log_eta = reg_value;
    if (f.d2_special) {
        // value = (2 + sqrt 2) * eta^E with eta = 1 + sqrt 2
        log_v = std::log(2.0 + std::sqrt(2.0)) + static_cast<double>(E) * log_eta;
    } else if (f.nu_family) {
        double log_nu = 0.5 * (reg_value + kLn2);
        log_v = log_nu + static_cast<double>(E) * log_eta;
    } else if (f.pcase == PolyCase::x2p4odd || f.pcase == PolyCase::x2m4odd) {
        log_v = kLn2 + static_cast<double>(E) * log_eta;
    } else {
        log_v = static_cast<double>(E) * log_eta;
    }
    // Y = (V - N/V)/(2 sqrt d), so ln Y = ln V - ln(2 sqrt d) + ln(1 - N/V^2).
    double corr = -static_cast<double>(f.N) * std::exp(-2.0 * log_v);
    PS_CHECK(corr > -0.9, "member_y_size_log: degenerate member");
    return log_v - log_2sqrtd + std::log1p(corr);
}

namespace {

struct ProbeState {
    std::uint64_t q;
    unsigned e;        // current probe exponent
    unsigned val = 0;  // resolved valuation
    bool resolved = false;
};

}  // namespace

SmoothVerdict smooth_test(const FamilySource& src, unsigned long member,
                          const std::vector<std::uint32_t>& primes, double size_log) {
    SmoothVerdict v;
    v.size_log = size_log;

    const EquationFamily& f = *src.fam;
    long rec = f.record_index(member);

    // Round one: a single batched modulus per <=256-bit chunk reveals which
    // primes divide Y at all; later rounds double exponents per live prime.
    std::vector<ProbeState> probes;
    probes.reserve(primes.size());
    for (std::uint32_t q : primes) probes.push_back({q, 1, 0, false});

    bool first_round = true;
    for (;;) {
        std::vector<ProbeState*> live;
        for (auto& p : probes)
            if (!p.resolved) live.push_back(&p);
        if (live.empty()) break;

        std::size_t i = 0;
        while (i < live.size()) {
            mpz_class M = 1;
            std::size_t j = i;
            for (; j < live.size(); ++j) {
                mpz_class next = M * pow_u64(live[j]->q, live[j]->e);
                if (j > i && mpz_sizeinbase(next.get_mpz_t(), 2) > 256) break;
                M = next;
            }
            mpz_class y = term_mod(src, rec, M).second;
            for (std::size_t t = i; t < j; ++t) {
                ProbeState& p = *live[t];
                mpz_class r = y % pow_u64(p.q, p.e);
                if (r != 0) {
                    p.val = residue_valuation(r, p.q);
                    p.resolved = true;
                } else if (first_round) {
                    p.e = 4;
                } else {
                    unsigned e_cap =
                        static_cast<unsigned>(size_log / std::log(static_cast<double>(p.q))) + 2;
                    if (p.e > e_cap + 4)
                        throw math_error("smooth_test: valuation cap exceeded at q = " +
                                         std::to_string(p.q));
                    p.e *= 2;
                }
            }
            i = j;
        }
        first_round = false;
    }

    double part = 0.0;
    for (const auto& p : probes) {
        if (p.val > 0) {
            v.factorization[p.q] = p.val;
            part += p.val * std::log(static_cast<double>(p.q));
        }
    }
    v.smooth_part_log = part;
    v.gap = size_log - part;
    PS_CHECK(v.gap > -0.2, "smooth_test: smooth part exceeds the size estimate (precision bug)");
    v.smooth = v.gap < kLn2 / 2.0;

    if (v.smooth) {
        // Confirm with one modular probe at a fresh 61-bit prime.
        const mpz_class pi("2305843009213693951");  // 2^61 - 1
        mpz_class expect = 1;
        for (const auto& [q, e] : v.factorization) {
            mpz_class t;
            mpz_class base(static_cast<unsigned long>(q)), ee(e);
            mpz_powm(t.get_mpz_t(), base.get_mpz_t(), ee.get_mpz_t(), pi.get_mpz_t());
            expect = expect * t % pi;
        }
        mpz_class got = term_mod(src, rec, pi).second % pi;
        if (expect != got)
            throw math_error("smooth_test: confirmation probe failed (false smooth verdict)");
    } else {
        v.factorization.clear();
    }
    return v;
}

mpz_class smooth_part(const FamilySource& src, unsigned long member,
                      const std::vector<std::uint32_t>& primes, double size_log) {
    mpz_class z = 1;
    for (std::uint32_t q : primes) {
        unsigned e_cap = static_cast<unsigned>(size_log / std::log(static_cast<double>(q))) + 2;
        unsigned vq = valuation_probe(src, member, q, e_cap);
        if (vq) z *= pow_u64(q, vq);
    }
    return z;
}

std::optional<std::map<std::uint64_t, unsigned>> trial_factor_smooth(const mpz_class& n,
                                                                     std::uint32_t bound) {
    return trial_factor_below(n, bound);
}

mpz_class reconstruct_x(const mpz_class& d, const mpz_class& y, int N) {
    mpz_class t = d * y * y + N;
    PS_CHECK(t >= 1, "reconstruct_x: nonpositive square");
    if (!mpz_perfect_square_p(t.get_mpz_t()))
        throw math_error("reconstruct_x: d y^2 + N is not a square (false smooth verdict)");
    mpz_class x;
    mpz_sqrt(x.get_mpz_t(), t.get_mpz_t());
    PS_CHECK(x * x - d * y * y == N, "reconstruct_x: verification failed");
    return x;
}

mpz_class factorization_value(const std::map<std::uint64_t, unsigned>& fac) {
    mpz_class v = 1;
    for (const auto& [p, e] : fac) {
        mpz_class t;
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(p), e);
        v *= t;
    }
    return v;
}

}  // namespace pellsmooth
