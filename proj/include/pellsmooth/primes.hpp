#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace pellsmooth {

// All primes p < bound (strict), ascending.
std::vector<std::uint32_t> primes_below(std::uint32_t bound);

bool is_prime_u64(std::uint64_t n);

// Full factorization if every prime factor is < bound, std::nullopt otherwise.
// n >= 1; the factorization of 1 is empty.
std::optional<std::map<std::uint64_t, unsigned>> trial_factor_below(const mpz_class& n,
                                                                    std::uint32_t bound);

// Factor n completely using trial division up to `td_bound` followed by
// Pollard rho on what remains. Intended for moderate operands (test oracles,
// squarefree-part extraction of already-smooth values).
std::map<mpz_class, unsigned> factor_full(const mpz_class& n, std::uint32_t td_bound = 100000);

// Squarefree kernel of n from its factorization.
mpz_class squarefree_part(const std::map<mpz_class, unsigned>& fac);

}  // namespace pellsmooth
