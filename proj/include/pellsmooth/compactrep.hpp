#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

#include "pellsmooth/infra.hpp"
#include "pellsmooth/quadint.hpp"
#include "pellsmooth/regulator.hpp"

namespace pellsmooth {

// Power-product representation beta = prod_{j=1..k} (alpha_j/d_j)^(2^(k-j))
// with alpha_j = (a_j + b_j sqrt d)/2. Every partial product
// theta_j = prod_{i<=j} (alpha_i/d_i)^(2^(j-i)) is an algebraic integer,
// which is what makes modular evaluation possible.
struct CompactRep {
    mpz_class d;
    std::vector<CompactTerm> terms;
    Real target_log;         // ln(beta)
    double target_log_d = 0;

    std::size_t k() const { return terms.size(); }
};

// Entry sizes are polynomial in d; we assert max(|a_j|, |b_j|, d_j) below
// 2^20 * d^2 on every constructed chain.
void assert_size_bounds(const CompactRep& rep);

// Chain for the fundamental unit eta_d. Reuses the walk cached on the
// regulator when present.
CompactRep build_compact(const FieldCtx& ctx, const Regulator& reg);
CompactRep build_compact(const mpz_class& d, const Regulator& reg);

// Chain for the fundamental solution nu of x^2 - d y^2 = +-2, which sits at
// distance (R + ln 2)/2 on the principal cycle. Requires d = 2, 3 (mod 4),
// d != 2, and that the norm-2 ideal is principal (callers decide solvability
// first; a walk that cannot land raises math_error).
CompactRep build_compact_nu(const FieldCtx& ctx, const Regulator& reg);

struct EvalResult {
    mpz_class A;
    mpz_class B;
    int two_val = 0;  // beta = (A + B sqrt d) / 2^two_val (mod m)
    // Denominator factors cleared during evaluation, as (factor, exponent);
    // factors are primes of m where m could be factored, residual blocks
    // otherwise.
    std::vector<std::pair<mpz_class, unsigned long>> cleared;
};

// Residues of beta modulo m >= 2; m need not be odd or coprime to the d_j.
EvalResult eval_mod(const CompactRep& rep, const mpz_class& m);

// Exact expansion; refuses (limit_error) when the result would exceed
// digit_cap decimal digits.
QuadInt expand_exact(const CompactRep& rep, std::size_t digit_cap = 1'000'000);

Real log_value(const CompactRep& rep, int precision_bits);

// Line format: "d k" header, then k lines "a_j b_j d_j". Bit-exact
// round-trip with parse_compact.
std::string serialize(const CompactRep& rep);
CompactRep parse_compact(const std::string& text, int precision_bits = 128);

}  // namespace pellsmooth
