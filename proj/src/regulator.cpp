#include "pellsmooth/regulator.hpp"

#include <cmath>
#include <unordered_map>

namespace pellsmooth {

namespace {

struct IdealKey {
    u128 v;
    bool operator==(const IdealKey& o) const { return v == o.v; }
};

struct IdealKeyHash {
    std::size_t operator()(const IdealKey& k) const {
        std::uint64_t lo = static_cast<std::uint64_t>(k.v);
        std::uint64_t hi = static_cast<std::uint64_t>(k.v >> 64);
        std::uint64_t x = lo ^ (hi * 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return static_cast<std::size_t>(x);
    }
};

IdealKey key_of(const Ideal& a) {
    return {(static_cast<u128>(static_cast<std::uint64_t>(a.P)) << 64) |
            static_cast<std::uint64_t>(a.Q)};
}

double tau_log_d(const FieldCtx& ctx, const Ideal& tau) {
    return std::log((static_cast<double>(tau.P) + ctx.sqrt_d) / static_cast<double>(tau.Q));
}

}  // namespace

int default_precision_bits(const mpz_class& d) {
    int bits_d = static_cast<int>(mpz_sizeinbase(d.get_mpz_t(), 2));
    return 64 + bits_d + 2 * 16;  // 16 ~ log2 of the longest doubling chain we meet
}

Real terms_log(const FieldCtx& ctx, const std::vector<CompactTerm>& terms, mpfr_prec_t prec) {
    Real acc(prec);
    Real t(prec), sq(prec), num(prec);
    mpfr_set_z(sq.get(), ctx.d.get_mpz_t(), MPFR_RNDN);
    mpfr_sqrt(sq.get(), sq.get(), MPFR_RNDN);
    for (const CompactTerm& term : terms) {
        // acc = 2*acc + ln((a + b sqrt d)/2) - ln(dj)
        mpfr_mul_2si(acc.get(), acc.get(), 1, MPFR_RNDN);
        mpfr_mul_z(num.get(), sq.get(), term.b.get_mpz_t(), MPFR_RNDN);
        mpfr_add_z(num.get(), num.get(), term.a.get_mpz_t(), MPFR_RNDN);
        PS_CHECK(mpfr_sgn(num.get()) > 0, "terms_log: non-positive term value");
        mpfr_log(t.get(), num.get(), MPFR_RNDN);
        mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
        mpfr_set_z(num.get(), term.dj.get_mpz_t(), MPFR_RNDN);
        mpfr_mul_2si(num.get(), num.get(), 1, MPFR_RNDN);  // 2*dj
        mpfr_log(t.get(), num.get(), MPFR_RNDN);
        mpfr_sub(acc.get(), acc.get(), t.get(), MPFR_RNDN);
    }
    return acc;
}

Regulator regulator(const mpz_class& d, int precision_bits, const RegulatorOptions& opts) {
    FieldCtx ctx(d);
    return regulator(ctx, precision_bits, opts);
}

Regulator regulator(const FieldCtx& ctx, int precision_bits, const RegulatorOptions& opts) {
    if (ctx.d > opts.d_ceiling)
        throw limit_error("regulator method exhausted: d = " + ctx.d.get_str() +
                          " exceeds the unconditional ceiling " + opts.d_ceiling.get_str());
    if (precision_bits <= 0) precision_bits = default_precision_bits(ctx.d);

    const double dd = mpz_get_d(ctx.d.get_mpz_t());
    const double disc = (ctx.sigma == 2) ? dd : 4.0 * dd;
    const double r_upper = std::sqrt(disc) * (0.5 * std::log(disc) + 2.0) + 4.0;
    const double margin = 2.0 * std::log(4.0 * dd) + 8.0;
    double window = std::max(std::log(4.0 * dd) + 6.0, 2.6 * std::sqrt(r_upper));
    window = std::min(window, 2.0e6);

    const Ideal org = origin_ideal(ctx);
    std::unordered_map<IdealKey, double, IdealKeyHash> table;
    table.reserve(4096);
    table.emplace(key_of(org), 0.0);

    Regulator out;
    out.d = ctx.d;

    Ideal cur = org;
    double dist = 0.0;
    std::size_t steps = 0;
    bool closed = false;
    Ideal g_ideal = org;
    double g_dist = 0.0;
    while (dist <= window + margin) {
        Ideal tau;
        cur = rho(ctx, cur, &tau);
        dist += tau_log_d(ctx, tau);
        ++steps;
        if (cur == org) {
            closed = true;
            break;
        }
        bool fresh = table.emplace(key_of(cur), dist).second;
        PS_CHECK(fresh, "regulator: repeated ideal before cycle closure");
        if (dist <= window) {
            g_ideal = cur;
            g_dist = dist;
        }
        if (steps > opts.baby_step_cap)
            throw limit_error("regulator method exhausted: baby-step budget for d = " +
                              ctx.d.get_str());
    }

    double r_double = 0.0;
    if (closed && !opts.force_bsgs) {
        r_double = dist;
        out.method = Regulator::Method::cf_sum;
        out.cf_period = steps;
        out.period_known = true;
    } else if (closed && opts.force_bsgs) {
        // testing hook: fall through to the giant phase anyway, using the
        // table built so far
        out.cf_period = steps;
        out.period_known = true;
    }

    if (!closed || opts.force_bsgs) {
        PS_CHECK(g_dist > 0.0, "regulator: empty baby window");
        Ideal G = g_ideal;
        double dG = g_dist;
        const std::size_t giant_cap =
            static_cast<std::size_t>(r_upper / std::max(0.3, 0.5 * g_dist)) + 4096;
        bool found = false;
        for (std::size_t i = 0; i < giant_cap + 8; ++i) {
            i128 content = 1;
            Ideal prod = mul_ideals(ctx, G, g_ideal, &content);
            GenAcc acc;
            acc.mul_scalar(content);
            G = reduce_ideal(ctx, prod, acc);
            double advance = g_dist + acc.logv;
            PS_CHECK(advance > 0.3, "regulator: giant step failed to advance");
            dG += advance;
            auto it = table.find(key_of(G));
            if (it != table.end()) {
                double cand = dG - it->second;
                if (cand > 0.4) {
                    r_double = cand;
                    found = true;
                    break;
                }
            }
        }
        PS_CHECK(found, "regulator: giant phase exhausted without a match");
        out.method = Regulator::Method::bsgs;
    }

    out.dvalue = r_double;

    // Refine through the power-product chain of the unit itself.
    auto terms = std::make_shared<std::vector<CompactTerm>>(doubling_walk(ctx, r_double, org));
    int rbits = static_cast<int>(std::ceil(std::log2(std::max(2.0, r_double))));
    mpfr_prec_t prec = precision_bits + rbits + static_cast<int>(terms->size()) + 32;
    Real refined = terms_log(ctx, *terms, prec);
    double refined_d = refined.to_double();
    PS_CHECK(std::fabs(refined_d - r_double) < 0.2,
             "regulator: refinement disagrees with the cycle walk");
    out.value = std::move(refined);
    out.dvalue = refined_d;
    out.abs_error_bound = std::ldexp(1.0, -precision_bits / 2);
    out.unit_terms = std::move(terms);
    return out;
}

}  // namespace pellsmooth
