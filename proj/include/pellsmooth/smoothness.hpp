#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pellsmooth/sequences.hpp"

namespace pellsmooth {

struct SmoothVerdict {
    bool smooth = false;
    std::map<std::uint64_t, unsigned> factorization;  // meaningful when smooth
    double smooth_part_log = 0.0;
    double size_log = 0.0;
    double gap = 0.0;  // size_log - smooth_part_log
};

// Exact q-adic valuation of Y at the given member, by modular probing with
// doubling exponents. e_cap must dominate size_log / ln q; running out of
// cap with a zero residue signals a precision bug and throws.
unsigned valuation_probe(const FamilySource& src, unsigned long member, std::uint64_t q,
                         unsigned e_cap);

// ln |Y_member| computed from the regulator, accurate to well under 0.01.
double member_y_size_log(const EquationFamily& f, double reg_value, unsigned long member);

// Full smoothness decision for the member's Y component: batched modular
// valuation probing against `primes`, a log-size comparison with tolerance
// ln(2)/2, and a fresh-prime confirmation of any positive verdict.
SmoothVerdict smooth_test(const FamilySource& src, unsigned long member,
                          const std::vector<std::uint32_t>& primes, double size_log);

// Smooth part z = prod p^(v_p(Y)) of the member's Y (exact integer).
mpz_class smooth_part(const FamilySource& src, unsigned long member,
                      const std::vector<std::uint32_t>& primes, double size_log);

// Oracle-side smoothness: full factorization of n if it is B-smooth.
std::optional<std::map<std::uint64_t, unsigned>> trial_factor_smooth(const mpz_class& n,
                                                                     std::uint32_t bound);

// x = sqrt(d y^2 + N), checked exactly; a non-square radicand means a false
// smooth verdict upstream and aborts.
mpz_class reconstruct_x(const mpz_class& d, const mpz_class& y, int N);

mpz_class factorization_value(const std::map<std::uint64_t, unsigned>& fac);

}  // namespace pellsmooth
