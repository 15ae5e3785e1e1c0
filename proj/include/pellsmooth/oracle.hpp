#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace pellsmooth {

// Independent verification. Deliberately built on plain integer arithmetic
// only: no continued fractions, units, or ideals, so a defect in the main
// pipeline cannot leak into its own check.

enum class PolyCase;  // pellsolve.hpp; only the enum value is shared

struct OracleReport {
    std::string case_name;
    std::uint32_t bound = 0;
    std::uint64_t x_limit = 0;
    std::size_t oracle_count = 0;
    std::size_t results_count = 0;  // run records with x <= x_limit
    std::vector<mpz_class> missing_in_results;
    std::vector<mpz_class> extra_in_results;

    bool clean() const { return missing_in_results.empty() && extra_in_results.empty(); }
    std::string text() const;
    std::string json() const;
};

// All x <= x_limit with f(x) >= 1 and f(x) B-smooth, by trial division.
std::vector<std::uint64_t> brute_force(PolyCase c, std::uint32_t bound, std::uint64_t x_limit,
                                       unsigned workers = 1);

// The unconditional completeness check: scans convergents p/q of sqrt(d)
// with q < z for a norm-N hit other than the known fundamental solution
// (y1 < 0 means "the fundamental's q is known to be >= z"). Returns true
// when no anomaly exists; false would mean the computed unit missed a
// smaller solution.
bool grh_free_check(const mpz_class& d, const mpz_class& z, int N, const mpz_class& y1);

}  // namespace pellsmooth
