#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "pellsmooth/util.hpp"

namespace pellsmooth {

// Arithmetic in the cycle of reduced ideals of the maximal order of
// Q(sqrt(d)). Ideals are [Q/sigma, (P + sqrt d)/sigma] with sigma*Q | d - P^2,
// sigma = 2 when d = 1 (mod 4) and 1 otherwise. Everything here runs on
// 128-bit words; callers keep d below ~2^94 (the regulator ceiling enforces
// a far smaller bound).
struct FieldCtx {
    mpz_class d;
    int sigma;
    mpz_class a0z;
    i128 d128;
    i128 a0;
    double sqrt_d;
    double log_2sqrtd;  // ln(2 sqrt d)

    explicit FieldCtx(const mpz_class& d_);
};

struct Ideal {
    i128 P;
    i128 Q;
    bool operator==(const Ideal& o) const { return P == o.P && Q == o.Q; }
};

// Canonical reduced representative of the unit ideal.
Ideal origin_ideal(const FieldCtx& ctx);

// Reduced ideal of norm 2 (the half-way target for the +-2 families).
// Requires d = 2, 3 (mod 4), d > 3.
Ideal norm_two_ideal(const FieldCtx& ctx);

bool is_reduced(const FieldCtx& ctx, const Ideal& a);

// Forward continued-fraction step on a reduced ideal. tau_out receives the
// consumed complete quotient (P', Q') with value (P' + sqrt d)/Q' > 1.
Ideal rho(const FieldCtx& ctx, const Ideal& a, Ideal* tau_out = nullptr);

// Inverse step: returns the reduced predecessor; tau_out receives the
// quotient that the forward step from it would consume, i.e. (a.P, a.Q).
Ideal rho_inv(const FieldCtx& ctx, const Ideal& a, Ideal* tau_out = nullptr);

// Product of primitive ideals: a1*a2 = S * result with result primitive but
// generally not reduced.
Ideal mul_ideals(const FieldCtx& ctx, const Ideal& a1, const Ideal& a2, i128* content);

Ideal square_ideal(const FieldCtx& ctx, const Ideal& a, i128* content);

// Exact relative generator accumulator: value (x + y sqrt d)/den with a
// double mirror of ln|value|.
struct GenAcc {
    mpz_class x = 1, y = 0, den = 1;
    double logv = 0.0;

    void mul_tau(const FieldCtx& ctx, i128 P, i128 Q);   // *= (P + sqrt d)/Q
    void div_tau(const FieldCtx& ctx, i128 P, i128 Q);   // /= (P + sqrt d)/Q
    void mul_scalar(i128 s);                             // *= s
    void div_scalar(i128 s);                             // /= s
    void compact();                                      // divide out gcd(x, y, den)
    double recompute_log(const FieldCtx& ctx) const;
    bool negative(const FieldCtx& ctx) const;            // sign of x + y sqrt d
};

// Reduce an arbitrary primitive ideal with relative-generator tracking.
// Each rho step maps a to (1/tau) a; with divide = false the accumulator
// collects prod(tau) (distance bookkeeping), with divide = true it collects
// prod(1/tau) (generator bookkeeping for principal-ideal chains). Signed Q
// appears only transiently inside.
Ideal reduce_ideal(const FieldCtx& ctx, Ideal a, GenAcc& acc, bool divide = false);

// One power-product term (a_j + b_j sqrt d)/2 / d_j of a compact
// representation chain.
struct CompactTerm {
    mpz_class a;
    mpz_class b;
    mpz_class dj;
};

// Jacobson/Williams-style doubling walk along the principal cycle: produces
// terms t_1..t_k with prod_j (alpha_j/d_j)^(2^(k-j)) equal to the generator
// of `target` at distance `dist` (|ln gen - dist| < 0.45). The distance must
// be accurate to much better than 0.4.
std::vector<CompactTerm> doubling_walk(const FieldCtx& ctx, double dist, const Ideal& target);

// Canonicalize an exact (x + y sqrt d)/den value into a CompactTerm with
// a = b (mod 2), d_j > 0, positive value.
CompactTerm canonical_term(const FieldCtx& ctx, GenAcc acc);

// ln of a term's value (alpha_j / d_j) in double precision.
double term_log(const FieldCtx& ctx, const CompactTerm& t);

}  // namespace pellsmooth
