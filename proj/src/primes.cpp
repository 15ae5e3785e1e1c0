#include "pellsmooth/primes.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>

#include "pellsmooth/util.hpp"

namespace pellsmooth {

std::vector<std::uint32_t> primes_below(std::uint32_t bound) {
    std::vector<std::uint32_t> out;
    if (bound <= 2) return out;
    std::vector<bool> sieve(bound, true);
    for (std::uint32_t i = 2; i < bound; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j < bound; j += i) sieve[j] = false;
    }
    return out;
}

bool is_prime_u64(std::uint64_t n) {
    mpz_class z(static_cast<unsigned long>(n));
    return mpz_probab_prime_p(z.get_mpz_t(), 32) > 0;
}

std::optional<std::map<std::uint64_t, unsigned>> trial_factor_below(const mpz_class& n,
                                                                    std::uint32_t bound) {
    if (n < 1) return std::nullopt;
    std::map<std::uint64_t, unsigned> fac;
    mpz_class m = n;
    for (std::uint32_t p : primes_below(bound)) {
        if (m == 1) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned e = 0;
            do {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(m.get_mpz_t(), p));
            fac[p] = e;
        }
    }
    if (m != 1) return std::nullopt;
    return fac;
}

namespace {

mpz_class pollard_rho(const mpz_class& n, unsigned long c) {
    // Brent's cycle-finding variant.
    mpz_class x = 2, y = 2, d = 1, diff, prod = 1;
    int count = 0;
    while (d == 1) {
        x = (x * x + c) % n;
        y = (y * y + c) % n;
        y = (y * y + c) % n;
        diff = x - y;
        if (diff == 0) return 0;  // cycle without factor, retry with new c
        prod = (prod * diff) % n;
        if (++count == 64) {
            mpz_gcd(d.get_mpz_t(), prod.get_mpz_t(), n.get_mpz_t());
            prod = 1;
            count = 0;
        }
    }
    if (d == n) return 0;
    return d;
}

void factor_rec(const mpz_class& n, std::map<mpz_class, unsigned>& out) {
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 32)) {
        out[n] += 1;
        return;
    }
    if (mpz_perfect_square_p(n.get_mpz_t())) {
        mpz_class r;
        mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
        factor_rec(r, out);
        factor_rec(r, out);
        return;
    }
    mpz_class d = 0;
    for (unsigned long c = 1; d == 0 || d == n; ++c) {
        if (c > 64) throw math_error("factor_full: pollard rho gave up on " + n.get_str());
        d = pollard_rho(n, c);
    }
    factor_rec(d, out);
    factor_rec(n / d, out);
}

}  // namespace

std::map<mpz_class, unsigned> factor_full(const mpz_class& n, std::uint32_t td_bound) {
    PS_CHECK(n >= 1, "factor_full: n must be >= 1");
    std::map<mpz_class, unsigned> out;
    mpz_class m = n;
    for (std::uint32_t p : primes_below(td_bound)) {
        if (m == 1) break;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            out[mpz_class(p)] += 1;
        }
    }
    factor_rec(m, out);
    return out;
}

mpz_class squarefree_part(const std::map<mpz_class, unsigned>& fac) {
    mpz_class d = 1;
    for (const auto& [p, e] : fac)
        if (e & 1) d *= p;
    return d;
}

}  // namespace pellsmooth
