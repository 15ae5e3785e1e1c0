#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pellsmooth/compactrep.hpp"

namespace pellsmooth {

// The six core pipeline cases, plus the composed x2+4 / x2-4 labels used for
// records produced by merging an odd branch with the doubled solutions of
// the matching x^2 +- 1 run. The composed values are labels only: they never
// enter the per-radicand pipeline.
enum class PolyCase { x2m1, x2p1, x2p2, x2m2, x2p4odd, x2m4odd, x2p4, x2m4 };

// Norm N of the Pell-type equation x^2 - d y^2 = N attached to the case.
int pell_norm(PolyCase c);

// f(x) for the case (x^2 - 1, x^2 + 2, ...).
mpz_class case_value(PolyCase c, const mpz_class& x);

// Whether the case scans odd x only.
bool odd_x_only(PolyCase c);

// Whether the value is one of the composed record labels.
bool composed_case(PolyCase c);

std::string case_label(PolyCase c);
std::optional<PolyCase> parse_case_label(const std::string& s);

// Primes that can divide f(x) at all (and hence d and y), below the strict
// bound B.
std::vector<std::uint32_t> allowed_primes(PolyCase c, std::uint32_t bound);

// Residue-class admissibility of a radicand for the case (d = 5 mod 8 for
// the +-4 odd branches, d = 2,3 mod 4 for +-2, nothing extra for +-1).
bool d_admissible(PolyCase c, const mpz_class& d);

// Power n in eta_d^n = fundamental solution of x^2 - d y^2 = 1, read off the
// residues of the unit numerator (u, v) modulo 16 together with d mod 16.
// Throws math_error if the residues match no classification row.
int unit_power_index(const mpz_class& d, const EvalResult& unit_mod16);

// Convenience: n for small d via the exact unit.
int unit_power_index_exact(const mpz_class& d);

// Cheap pre-filter on the odd prime factors of d for the +-2 equations:
// +2 requires every odd p | d to be +-1 (mod 8), -2 requires 1 or 3 (mod 8).
bool yokoi_residue_filter(PolyCase c, const std::vector<std::uint32_t>& d_odd_primes);
bool yokoi_residue_filter(PolyCase c, const mpz_class& d);

// Unit criterion: with eta_d = t + u sqrt d (d = 2,3 mod 4), x^2 - dy^2 = 2
// is solvable iff t = 1 (mod d) and = -2 iff t = -1 (mod d).
bool yokoi_unit_criterion(PolyCase c, const mpz_class& d, const CompactRep& rep_eta);

// A solved Pell-type instance: which powers of eta (or of nu for the +-2
// families) are solutions, and how record indices map to exponents.
struct EquationFamily {
    PolyCase pcase;
    mpz_class d;
    int N = 0;
    int table_n = 0;       // unit power index n (0 for the +-2 families)
    int base_exp = 1;      // member exponents are multiples of this
    bool nu_family = false;
    bool d2_special = false;  // d = 2: both +-2 equations are solvable

    // Exponent of eta for the m-th member (m >= 1); for nu families the
    // member value is nu * eta^exponent.
    unsigned long eta_exponent(unsigned long m) const;
    // Paper-style power index recorded for the m-th member.
    long record_index(unsigned long m) const;
    // Number of members scanned for smoothness bound B.
    unsigned long member_count(std::uint32_t bound) const;
};

// Classification for the +-1 / +-4 cases from the Table-1 index n; nullopt
// when the case has no solutions for this d.
std::optional<EquationFamily> classify_unit_family(PolyCase c, const mpz_class& d, int table_n);

// Classification for the +-2 cases given the solvable sign (+2, -2, or 0 for
// unsolvable) as decided by the half-period test / unit criterion.
std::optional<EquationFamily> classify_two_family(PolyCase c, const mpz_class& d, int solvable_sign);

// Exact small-d solvability decision (continued fractions only); used by
// tests and the standalone verify path.
std::optional<EquationFamily> solvable_small(PolyCase c, const mpz_class& d);

}  // namespace pellsmooth
