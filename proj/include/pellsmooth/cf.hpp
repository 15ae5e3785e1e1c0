#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "pellsmooth/quadint.hpp"

namespace pellsmooth {

// One period of the continued fraction of sqrt(d).
//
// sqrt(d) = [a0; period...] with period[l-1] = 2*a0; pq_seq[i] = (P_{i+1}, Q_{i+1})
// for i = 0..l-1, so pq_seq.back().second == 1 when the period closes.
struct CFExpansion {
    mpz_class d;
    mpz_class a0;
    std::vector<mpz_class> period;
    std::vector<std::pair<mpz_class, mpz_class>> pq_seq;
    std::size_t l = 0;
    bool complete = false;  // false: step_cap hit before the period closed
};

constexpr std::size_t kDefaultCfStepCap = 20'000'000;

// Throws usage_error for d < 2 or d a perfect square.
CFExpansion cf_expand(const mpz_class& d, std::size_t step_cap = kDefaultCfStepCap);

struct PellSolution {
    mpz_class x;
    mpz_class y;
    int norm;  // +1 or -1; -1 exactly when the period length is odd
};

// Minimal solution of x^2 - d y^2 = +-1 over the integers.
PellSolution pell_fundamental(const mpz_class& d, std::size_t step_cap = kDefaultCfStepCap);

// Fundamental unit eta_d > 1 of the maximal order of Q(sqrt(d)).
QuadInt fundamental_unit(const mpz_class& d, std::size_t step_cap = kDefaultCfStepCap);

struct Convergent {
    mpz_class p;
    mpz_class q;
    mpz_class form_value;  // p^2 - d q^2
};

// Streams every convergent p/q of sqrt(d) with q < z, in order. The callback
// returns false to stop early.
void convergents_up_to(const mpz_class& d, const mpz_class& z,
                       const std::function<bool(const Convergent&)>& emit);

std::vector<Convergent> convergents_up_to_vec(const mpz_class& d, const mpz_class& z);

// Half-period test for x^2 - d y^2 = +-2: for even period length l, solvable
// exactly when Q_{l/2} == 2, with norm sign (-1)^{l/2}. Returns 0 when
// unsolvable, otherwise the sign (+2 or -2). d must be != 2 here; d = 2 is
// handled as a special family by callers.
int half_period_two_test(const mpz_class& d, std::size_t step_cap = kDefaultCfStepCap);

// Exact fundamental solution of x^2 - d y^2 = +-2 from the half period
// (the convergent pair just before the midpoint). Only valid when
// half_period_two_test(d) != 0.
PellSolution two_fundamental(const mpz_class& d, std::size_t step_cap = kDefaultCfStepCap);

}  // namespace pellsmooth
