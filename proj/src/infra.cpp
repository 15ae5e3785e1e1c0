#include "pellsmooth/infra.hpp"

#include <cmath>

#include "pellsmooth/quadint.hpp"

namespace pellsmooth {

FieldCtx::FieldCtx(const mpz_class& d_) : d(d_) {
    PS_CHECK(d >= 2, "FieldCtx: d must be >= 2");
    PS_CHECK(!mpz_perfect_square_p(d.get_mpz_t()), "FieldCtx: d must not be a square");
    PS_CHECK(mpz_sizeinbase(d.get_mpz_t(), 2) <= 94, "FieldCtx: d too large for word arithmetic");
    sigma = (d % 4 == 1) ? 2 : 1;
    mpz_sqrt(a0z.get_mpz_t(), d.get_mpz_t());
    d128 = to_i128(d);
    a0 = to_i128(a0z);
    sqrt_d = std::sqrt(mpz_get_d(d.get_mpz_t()));
    log_2sqrtd = std::log(2.0) + 0.5 * std::log(mpz_get_d(d.get_mpz_t()));
}

Ideal origin_ideal(const FieldCtx& ctx) {
    if (ctx.sigma == 1) return {ctx.a0, 1};
    i128 P = (ctx.a0 % 2 != 0) ? ctx.a0 : ctx.a0 - 1;
    return {P, 2};
}

Ideal norm_two_ideal(const FieldCtx& ctx) {
    PS_CHECK(ctx.sigma == 1 && ctx.d128 > 2, "norm_two_ideal: requires d = 2,3 (mod 4), d != 2");
    i128 par = ctx.d128 % 2;
    i128 P = (ctx.a0 % 2 == par) ? ctx.a0 : ctx.a0 - 1;
    PS_CHECK(P >= 1, "norm_two_ideal: no reduced representative");
    PS_CHECK((ctx.d128 - P * P) % 2 == 0, "norm_two_ideal: parity");
    return {P, 2};
}

bool is_reduced(const FieldCtx& ctx, const Ideal& a) {
    if (a.Q < 1 || a.P < 1) return false;
    if (a.P > ctx.a0) return false;
    if (a.P + a.Q < ctx.a0 + 1) return false;
    if (a.Q - a.P > ctx.a0) return false;
    return true;
}

Ideal rho(const FieldCtx& ctx, const Ideal& a, Ideal* tau_out) {
    i128 q = fdiv_i128(a.P + ctx.a0, a.Q);
    i128 Pn = q * a.Q - a.P;
    i128 Qn = (ctx.d128 - Pn * Pn) / a.Q;
    if (tau_out) *tau_out = {Pn, Qn};
    return {Pn, Qn};
}

Ideal rho_inv(const FieldCtx& ctx, const Ideal& a, Ideal* tau_out) {
    i128 Qp = (ctx.d128 - a.P * a.P) / a.Q;
    i128 r = (ctx.a0 + a.P) % Qp;
    if (r < 0) r += Qp;
    i128 Pp = ctx.a0 - r;
    if (tau_out) *tau_out = {a.P, a.Q};
    return {Pp, Qp};
}

void GenAcc::mul_tau(const FieldCtx& ctx, i128 P, i128 Q) {
    mpz_class Pz = from_i128(P);
    mpz_class nx = x * Pz + y * ctx.d;
    mpz_class ny = x + y * Pz;
    x = nx;
    y = ny;
    if (Q < 0) {
        den *= from_i128(-Q);
        x = -x;
        y = -y;
    } else {
        den *= from_i128(Q);
    }
    logv += std::log(std::fabs((static_cast<double>(P) + ctx.sqrt_d) / static_cast<double>(Q)));
}

void GenAcc::div_tau(const FieldCtx& ctx, i128 P, i128 Q) {
    // *= Q (sqrt d - P) / (d - P^2)
    mpz_class Pz = from_i128(P);
    mpz_class nx = y * ctx.d - x * Pz;
    mpz_class ny = x - y * Pz;
    x = nx;
    y = ny;
    i128 m = (ctx.d128 - P * P) / Q;
    if (m < 0) {
        den *= from_i128(-m);
        x = -x;
        y = -y;
    } else {
        den *= from_i128(m);
    }
    logv -= std::log(std::fabs((static_cast<double>(P) + ctx.sqrt_d) / static_cast<double>(Q)));
}

void GenAcc::mul_scalar(i128 s) {
    PS_CHECK(s != 0, "GenAcc: zero content");
    if (s < 0) s = -s;
    mpz_class sz = from_i128(s);
    x *= sz;
    y *= sz;
    logv += log_i128(s);
}

void GenAcc::div_scalar(i128 s) {
    PS_CHECK(s != 0, "GenAcc: zero content");
    if (s < 0) s = -s;
    den *= from_i128(s);
    logv -= log_i128(s);
}

void GenAcc::compact() {
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), den.get_mpz_t());
    if (g > 1) {
        x /= g;
        y /= g;
        den /= g;
    }
}

double GenAcc::recompute_log(const FieldCtx& ctx) const {
    QuadInt v(x, y, 1, ctx.d);
    signed long e;
    double m = mpz_get_d_2exp(&e, den.get_mpz_t());
    double logden = std::log(m) + 0.6931471805599453 * static_cast<double>(e);
    return v.log_approx() - logden;
}

bool GenAcc::negative(const FieldCtx& ctx) const {
    int sx = sgn(x), sy = sgn(y);
    if (sx >= 0 && sy >= 0) return false;
    if (sx <= 0 && sy <= 0) return true;
    mpz_class lhs = x * x, rhs = ctx.d * y * y;
    if (sx > 0 && sy < 0) return lhs < rhs;  // positive part is x
    return lhs > rhs;                        // sx < 0, sy > 0: positive part is y sqrt d
}

namespace {

// mpz mirrors of one reduction step; used while P, Q may exceed word range
// (right after composition).
struct BigIdeal {
    mpz_class P, Q;
};

double log_mpz(const mpz_class& z) {
    signed long e;
    double m = mpz_get_d_2exp(&e, z.get_mpz_t());
    return std::log(std::fabs(m)) + 0.6931471805599453 * static_cast<double>(e);
}

// log |(P + sqrt d)/Q|; goes through the norm when the numerator cancels.
double tau_log_big(const FieldCtx& ctx, const mpz_class& P, const mpz_class& Q) {
    const double frac = ctx.sqrt_d - mpz_get_d(ctx.a0z.get_mpz_t());
    if (P >= 0) {
        return log_mpz(P + ctx.a0z) +
               std::log1p(frac / (mpz_get_d(P.get_mpz_t()) + mpz_get_d(ctx.a0z.get_mpz_t()))) -
               log_mpz(Q);
    }
    // |P + sqrt d| = (d - P^2) / (|P| + sqrt d), cancellation-free
    mpz_class n = ctx.d - P * P;
    mpz_class ap = -P;
    double denom = log_mpz(ap + ctx.a0z) +
                   std::log1p(frac / (mpz_get_d(ap.get_mpz_t()) + mpz_get_d(ctx.a0z.get_mpz_t())));
    return log_mpz(n) - denom - log_mpz(Q);
}

void acc_mul_tau_big(const FieldCtx& ctx, GenAcc& acc, const mpz_class& P, const mpz_class& Q) {
    mpz_class nx = acc.x * P + acc.y * ctx.d;
    mpz_class ny = acc.x + acc.y * P;
    acc.x = nx;
    acc.y = ny;
    if (Q < 0) {
        acc.den *= -Q;
        acc.x = -acc.x;
        acc.y = -acc.y;
    } else {
        acc.den *= Q;
    }
    acc.logv += tau_log_big(ctx, P, Q);
}

void acc_div_tau_big(const FieldCtx& ctx, GenAcc& acc, const mpz_class& P, const mpz_class& Q) {
    // *= Q (sqrt d - P) / (d - P^2)
    mpz_class nx = acc.y * ctx.d - acc.x * P;
    mpz_class ny = acc.x - acc.y * P;
    acc.x = nx;
    acc.y = ny;
    mpz_class m = (ctx.d - P * P) / Q;
    if (m < 0) {
        acc.den *= -m;
        acc.x = -acc.x;
        acc.y = -acc.y;
    } else {
        acc.den *= m;
    }
    acc.logv -= tau_log_big(ctx, P, Q);
}

bool is_reduced_big(const FieldCtx& ctx, const BigIdeal& a) {
    if (a.Q < 1 || a.P < 1) return false;
    if (a.P > ctx.a0z) return false;
    if (a.P + a.Q < ctx.a0z + 1) return false;
    if (a.Q - a.P > ctx.a0z) return false;
    return true;
}

// floor((P + sqrt d)/Q) for signed Q, exact.
mpz_class floor_quot_big(const FieldCtx& ctx, const mpz_class& P, const mpz_class& Q) {
    mpz_class num = (Q > 0) ? mpz_class(P + ctx.a0z) : mpz_class(P + ctx.a0z + 1);
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), Q.get_mpz_t());
    return q;
}

Ideal reduce_big(const FieldCtx& ctx, BigIdeal a, GenAcc& acc, bool divide) {
    PS_CHECK(a.Q != 0, "reduce: zero denominator");
    int guard = 0;
    while (!is_reduced_big(ctx, a)) {
        mpz_class q = floor_quot_big(ctx, a.P, a.Q);
        mpz_class Pn = q * a.Q - a.P;
        mpz_class Qn = (ctx.d - Pn * Pn) / a.Q;
        if (divide)
            acc_div_tau_big(ctx, acc, Pn, Qn);
        else
            acc_mul_tau_big(ctx, acc, Pn, Qn);
        a.P = Pn;
        a.Q = Qn;
        PS_CHECK(++guard < 600, "reduce: failed to converge");
    }
    return {to_i128(a.P), to_i128(a.Q)};
}

}  // namespace

Ideal mul_ideals(const FieldCtx& ctx, const Ideal& a1, const Ideal& a2, i128* content) {
    mpz_class Q1 = from_i128(a1.Q), Q2 = from_i128(a2.Q);
    mpz_class P1 = from_i128(a1.P), P2 = from_i128(a2.P);
    mpz_class u1, v1, g1;
    mpz_gcdext(g1.get_mpz_t(), u1.get_mpz_t(), v1.get_mpz_t(), Q1.get_mpz_t(), Q2.get_mpz_t());
    mpz_class s = P1 + P2, u2, w, G;
    mpz_gcdext(G.get_mpz_t(), u2.get_mpz_t(), w.get_mpz_t(), g1.get_mpz_t(), s.get_mpz_t());

    mpz_class Q3 = ctx.sigma * (Q1 / G) * (Q2 / G);
    mpz_class E = u2 * u1 * Q1 * P2 + u2 * v1 * Q2 * P1 + w * (P1 * P2 + ctx.d);
    PS_CHECK(E % G == 0, "mul_ideals: composition not integral");
    mpz_class P3 = (E / G) % Q3;
    if (P3 < 0) P3 += Q3;
    PS_CHECK((ctx.d - P3 * P3) % (ctx.sigma * Q3) == 0, "mul_ideals: result not in standard form");
    PS_CHECK(G % ctx.sigma == 0, "mul_ideals: content not integral");
    if (content) *content = to_i128(G / ctx.sigma);
    return {to_i128(P3), to_i128(Q3)};
}

Ideal square_ideal(const FieldCtx& ctx, const Ideal& a, i128* content) {
    return mul_ideals(ctx, a, a, content);
}

Ideal reduce_ideal(const FieldCtx& ctx, Ideal a, GenAcc& acc, bool divide) {
    return reduce_big(ctx, {from_i128(a.P), from_i128(a.Q)}, acc, divide);
}

CompactTerm canonical_term(const FieldCtx& ctx, GenAcc acc) {
    PS_CHECK(acc.den > 0, "canonical_term: denominator must be positive");
    if (acc.negative(ctx)) {
        acc.x = -acc.x;
        acc.y = -acc.y;
    }
    acc.compact();
    CompactTerm t;
    bool even_den = mpz_even_p(acc.den.get_mpz_t());
    bool same_par = mpz_even_p(mpz_class(acc.x - acc.y).get_mpz_t());
    if (even_den && same_par) {
        t.a = acc.x;
        t.b = acc.y;
        t.dj = acc.den / 2;
    } else {
        t.a = 2 * acc.x;
        t.b = 2 * acc.y;
        t.dj = acc.den;
    }
    return t;
}

double term_log(const FieldCtx& ctx, const CompactTerm& t) {
    QuadInt num(t.a, t.b, 1, ctx.d);
    signed long e;
    double m = mpz_get_d_2exp(&e, t.dj.get_mpz_t());
    double logdj = std::log(m) + 0.6931471805599453 * static_cast<double>(e);
    return num.log_approx() - std::log(2.0) - logdj;
}

namespace {

double tau_log(const FieldCtx& ctx, const Ideal& tau) {
    return std::log((static_cast<double>(tau.P) + ctx.sqrt_d) / static_cast<double>(tau.Q));
}

}  // namespace

std::vector<CompactTerm> doubling_walk(const FieldCtx& ctx, double dist, const Ideal& target) {
    // Walks ideals c_j = (theta_j) with theta_j = theta_{j-1}^2 * alpha_j/d_j
    // an algebraic integer of log close to dist/2^(k-j). Growing theta is a
    // backward cycle step (rho_inv), shrinking is a forward one; squaring an
    // ideal divides the generator by the content of c^2.
    PS_CHECK(dist > 0.4, "doubling_walk: distance too small");
    const double t0 = std::max(1.25, ctx.log_2sqrtd);
    int k = 0;
    while (std::ldexp(dist, -k) > t0) ++k;
    if (k == 0) k = 1;
    const double tol = 1e-7;

    std::vector<CompactTerm> terms;
    terms.reserve(k + 1);

    Ideal cur = origin_ideal(ctx);
    double lt = 0.0;  // ln(theta)

    auto grow = [&](GenAcc& acc) {
        // c <- rho_inv(c), theta *= (P + sqrt d)/Q of the current ideal
        Ideal tau;
        Ideal prev = rho_inv(ctx, cur, &tau);
        acc.mul_tau(ctx, tau.P, tau.Q);
        cur = prev;
        return tau_log(ctx, tau);
    };
    auto peek_grow_log = [&]() { return tau_log(ctx, {cur.P, cur.Q}); };
    auto shrink = [&](GenAcc& acc) {
        Ideal tau;
        Ideal nxt = rho(ctx, cur, &tau);
        acc.div_tau(ctx, tau.P, tau.Q);
        cur = nxt;
        return tau_log(ctx, tau);
    };

    // level 0: never overshoot dist / 2^k
    double x_target = std::ldexp(dist, -k);
    {
        GenAcc acc;
        int guard = 0;
        while (lt + peek_grow_log() <= x_target + tol) {
            lt += grow(acc);
            PS_CHECK(++guard < 1000000, "doubling_walk: level-0 runaway");
        }
        terms.push_back(canonical_term(ctx, acc));
    }

    for (int j = 1; j <= k; ++j) {
        x_target = std::ldexp(dist, -(k - j));
        const bool final_level = (j == k);
        i128 content = 1;
        Ideal sq = square_ideal(ctx, cur, &content);
        GenAcc acc;
        acc.div_scalar(content);
        double base = 2.0 * lt;
        cur = reduce_ideal(ctx, sq, acc, /*divide=*/true);  // rho steps divide theta

        int guard = 0;
        if (!final_level) {
            while (base + acc.logv > x_target + tol) {
                shrink(acc);
                PS_CHECK(++guard < 1000000, "doubling_walk: shrink runaway");
            }
            while (base + acc.logv + peek_grow_log() <= x_target + tol) {
                grow(acc);
                PS_CHECK(++guard < 1000000, "doubling_walk: grow runaway");
            }
        } else {
            // land exactly on the target ideal inside the +-0.45 window
            bool landed = false;
            while (base + acc.logv > x_target - 0.45) {
                if (cur == target && std::fabs(base + acc.logv - x_target) <= 0.45) {
                    landed = true;
                    break;
                }
                shrink(acc);
                PS_CHECK(++guard < 1000000, "doubling_walk: shrink runaway");
            }
            while (!landed) {
                if (base + acc.logv > x_target + 0.45)
                    throw math_error("doubling_walk: missed target ideal (inconsistent regulator)");
                if (cur == target && std::fabs(base + acc.logv - x_target) <= 0.45) {
                    landed = true;
                    break;
                }
                grow(acc);
                PS_CHECK(++guard < 1000000, "doubling_walk: landing runaway");
            }
        }
        lt = base + acc.logv;
        terms.push_back(canonical_term(ctx, acc));
    }
    PS_CHECK(cur == target, "doubling_walk: did not land on target");
    PS_CHECK(std::fabs(lt - dist) <= 0.45, "doubling_walk: landing log out of window");
    return terms;
}

}  // namespace pellsmooth
