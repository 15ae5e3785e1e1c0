#include "pellsmooth/oracle.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include "pellsmooth/pellsolve.hpp"
#include "pellsmooth/primes.hpp"
#include "pellsmooth/util.hpp"

#include "json.hpp"

namespace pellsmooth {

namespace {

// f(x) for x <= ~10^9 fits comfortably in unsigned 64-bit words.
bool smooth_u64(std::uint64_t n, const std::vector<std::uint32_t>& primes) {
    for (std::uint32_t p : primes) {
        while (n % p == 0) n /= p;
        if (n == 1) return true;
    }
    return n == 1;
}

std::int64_t case_value_i64(PolyCase c, std::uint64_t x) {
    std::int64_t v = static_cast<std::int64_t>(x * x);
    switch (c) {
        case PolyCase::x2m1: return v - 1;
        case PolyCase::x2p1: return v + 1;
        case PolyCase::x2p2: return v + 2;
        case PolyCase::x2m2: return v - 2;
        case PolyCase::x2p4odd: return v + 4;
        case PolyCase::x2m4odd: return v - 4;
        default: break;
    }
    throw math_error("case_value_i64: bad case");
}

}  // namespace

std::vector<std::uint64_t> brute_force(PolyCase c, std::uint32_t bound, std::uint64_t x_limit,
                                       unsigned workers) {
    PS_CHECK(x_limit <= 1000000000ULL, "brute_force: x_limit above the 10^9 time guard");
    auto primes = primes_below(bound);
    const bool odd_only = odd_x_only(c);
    if (workers == 0) workers = 1;

    std::vector<std::vector<std::uint64_t>> found(workers);
    auto scan = [&](unsigned w) {
        std::uint64_t stride = workers;
        for (std::uint64_t x = 1 + w; x <= x_limit; x += stride) {
            if (odd_only && x % 2 == 0) continue;
            std::int64_t v = case_value_i64(c, x);
            if (v < 1) continue;
            if (smooth_u64(static_cast<std::uint64_t>(v), primes)) found[w].push_back(x);
        }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::thread> ts;
        for (unsigned w = 0; w < workers; ++w) ts.emplace_back(scan, w);
        for (auto& t : ts) t.join();
    }
    std::vector<std::uint64_t> out;
    for (auto& v : found) out.insert(out.end(), v.begin(), v.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool grh_free_check(const mpz_class& d, const mpz_class& z, int N, const mpz_class& y1) {
    // Self-contained convergent walk (kept independent of the main
    // continued-fraction code on purpose).
    if (z <= 1) return true;
    PS_CHECK(d >= 2 && !mpz_perfect_square_p(d.get_mpz_t()), "grh_free_check: bad radicand");
    mpz_class a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());
    mpz_class P = 0, Q = 1, a = a0;
    mpz_class pm1 = 1, p = a0, qm1 = 0, q = 1;
    while (q < z) {
        if (p * p - d * q * q == N && q != y1) return false;
        mpz_class Pn = a * Q - P;
        mpz_class Qn = (d - Pn * Pn) / Q;
        P = Pn;
        Q = Qn;
        a = (P + a0) / Q;
        mpz_class pn = a * p + pm1;
        mpz_class qn = a * q + qm1;
        pm1 = p;
        p = pn;
        qm1 = q;
        q = qn;
    }
    return true;
}

std::string OracleReport::text() const {
    std::ostringstream os;
    os << "oracle cross-validation: case=" << case_name << " bound=" << bound
       << " x_limit=" << x_limit << "\n";
    os << "  oracle solutions:  " << oracle_count << "\n";
    os << "  results in range:  " << results_count << "\n";
    if (clean()) {
        os << "  verdict: MATCH (zero mismatches)\n";
    } else {
        os << "  verdict: MISMATCH\n";
        for (const auto& x : missing_in_results) os << "  missing from results: " << x.get_str() << "\n";
        for (const auto& x : extra_in_results) os << "  not found by oracle:  " << x.get_str() << "\n";
    }
    return os.str();
}

std::string OracleReport::json() const {
    nlohmann::json j;
    j["case"] = case_name;
    j["bound"] = bound;
    j["x_limit"] = x_limit;
    j["oracle_count"] = oracle_count;
    j["results_count"] = results_count;
    j["mismatches"] = nlohmann::json::array();
    for (const auto& x : missing_in_results)
        j["mismatches"].push_back({{"x", x.get_str()}, {"kind", "missing_from_results"}});
    for (const auto& x : extra_in_results)
        j["mismatches"].push_back({{"x", x.get_str()}, {"kind", "not_found_by_oracle"}});
    j["clean"] = clean();
    return j.dump(2);
}

}  // namespace pellsmooth
