#include "pellsmooth/pellsolve.hpp"

#include "pellsmooth/cf.hpp"
#include "pellsmooth/primes.hpp"
#include "pellsmooth/util.hpp"

namespace pellsmooth {

int pell_norm(PolyCase c) {
    switch (c) {
        case PolyCase::x2m1: return +1;
        case PolyCase::x2p1: return -1;
        case PolyCase::x2p2: return -2;
        case PolyCase::x2m2: return +2;
        case PolyCase::x2p4odd: return -4;
        case PolyCase::x2m4odd: return +4;
        case PolyCase::x2p4:
        case PolyCase::x2m4: break;  // labels only, no pipeline norm
    }
    throw math_error("pell_norm: bad case");
}

mpz_class case_value(PolyCase c, const mpz_class& x) {
    switch (c) {
        case PolyCase::x2m1: return x * x - 1;
        case PolyCase::x2p1: return x * x + 1;
        case PolyCase::x2p2: return x * x + 2;
        case PolyCase::x2m2: return x * x - 2;
        case PolyCase::x2p4odd:
        case PolyCase::x2p4: return x * x + 4;
        case PolyCase::x2m4odd:
        case PolyCase::x2m4: return x * x - 4;
    }
    throw math_error("case_value: bad case");
}

bool odd_x_only(PolyCase c) { return c == PolyCase::x2p4odd || c == PolyCase::x2m4odd; }

bool composed_case(PolyCase c) { return c == PolyCase::x2p4 || c == PolyCase::x2m4; }

std::string case_label(PolyCase c) {
    switch (c) {
        case PolyCase::x2m1: return "x2-1";
        case PolyCase::x2p1: return "x2+1";
        case PolyCase::x2p2: return "x2+2";
        case PolyCase::x2m2: return "x2-2";
        case PolyCase::x2p4odd: return "x2+4odd";
        case PolyCase::x2m4odd: return "x2-4odd";
        case PolyCase::x2p4: return "x2+4";
        case PolyCase::x2m4: return "x2-4";
    }
    throw math_error("case_label: bad case");
}

std::optional<PolyCase> parse_case_label(const std::string& s) {
    if (s == "x2-1") return PolyCase::x2m1;
    if (s == "x2+1") return PolyCase::x2p1;
    if (s == "x2+2") return PolyCase::x2p2;
    if (s == "x2-2") return PolyCase::x2m2;
    if (s == "x2+4odd") return PolyCase::x2p4odd;
    if (s == "x2-4odd") return PolyCase::x2m4odd;
    if (s == "x2+4") return PolyCase::x2p4;
    if (s == "x2-4") return PolyCase::x2m4;
    return std::nullopt;
}

std::vector<std::uint32_t> allowed_primes(PolyCase c, std::uint32_t bound) {
    PS_CHECK(bound >= 3, "allowed_primes: bound must be >= 3");
    if (c == PolyCase::x2p4 || c == PolyCase::x2m4)
        throw usage_error("composed cases are run as odd branch + doubled x^2 +- 1 run");
    std::vector<std::uint32_t> out;
    for (std::uint32_t p : primes_below(bound)) {
        bool ok = false;
        switch (c) {
            case PolyCase::x2m1: ok = true; break;
            case PolyCase::x2p1: ok = (p == 2) || (p % 4 == 1); break;
            case PolyCase::x2p2: ok = (p == 2) || (p % 8 == 1) || (p % 8 == 3); break;
            case PolyCase::x2m2: ok = (p == 2) || (p % 8 == 1) || (p % 8 == 7); break;
            case PolyCase::x2p4odd: ok = (p % 4 == 1); break;
            case PolyCase::x2m4odd: ok = (p != 2); break;
            default: break;
        }
        if (ok) out.push_back(p);
    }
    return out;
}

bool d_admissible(PolyCase c, const mpz_class& d) {
    if (d < 2) return false;
    switch (c) {
        case PolyCase::x2p4odd:
        case PolyCase::x2m4odd:
            return d % 8 == 5;
        case PolyCase::x2p2:
        case PolyCase::x2m2: {
            unsigned long r = mpz_class(d % 4).get_ui();
            return r == 2 || r == 3;
        }
        default:
            return true;
    }
}

namespace {

long umod(const mpz_class& z, long m) {
    mpz_class r = z % m;
    if (r < 0) r += m;
    return r.get_si();
}

}  // namespace

int unit_power_index(const mpz_class& d, const EvalResult& unit_mod16) {
    long dm16 = umod(d, 16);
    long u, v;
    if (unit_mod16.two_val == 1) {
        u = umod(unit_mod16.A, 16);
        v = umod(unit_mod16.B, 16);
    } else if (d % 4 == 1) {
        u = (2 * umod(unit_mod16.A, 16)) % 16;
        v = (2 * umod(unit_mod16.B, 16)) % 16;
    } else {
        u = umod(unit_mod16.A, 16);
        v = umod(unit_mod16.B, 16);
    }

    if (dm16 % 4 == 3) return 1;
    if (dm16 % 4 == 2) return (v % 2 == 1) ? 2 : 1;
    if (dm16 % 4 == 1) {
        if (v % 2 == 0) return (v % 4 == 2) ? 2 : 1;
        // half-integral unit: only d = 5 (mod 8) admits one
        bool pm_v = ((u - v) % 8 + 8) % 8 == 0 || ((u + v) % 8) % 8 == 0;
        bool pm_3v = ((u - 3 * v) % 8 + 8) % 8 == 0 || ((u + 3 * v) % 8) % 8 == 0;
        if (dm16 == 5) {
            if (pm_3v) return 3;
            if (pm_v) return 6;
        } else if (dm16 == 13) {
            if (pm_v) return 3;
            if (pm_3v) return 6;
        }
        throw math_error("unit_power_index: residues (" + std::to_string(u) + "," +
                         std::to_string(v) + ") mod 16 match no classification row for d = " +
                         d.get_str());
    }
    throw math_error("unit_power_index: d = 0 (mod 4) is not squarefree");
}

int unit_power_index_exact(const mpz_class& d) {
    QuadInt eta = fundamental_unit(d);
    EvalResult res;
    res.A = eta.a % 16;
    res.B = eta.b % 16;
    res.two_val = (eta.s == 2) ? 1 : 0;
    return unit_power_index(d, res);
}

bool yokoi_residue_filter(PolyCase c, const std::vector<std::uint32_t>& d_odd_primes) {
    PS_CHECK(c == PolyCase::x2p2 || c == PolyCase::x2m2, "yokoi_residue_filter: +-2 cases only");
    for (std::uint32_t p : d_odd_primes) {
        if (p == 2) continue;
        std::uint32_t r = p % 8;
        if (c == PolyCase::x2m2) {       // x^2 - d y^2 = +2
            if (r != 1 && r != 7) return false;
        } else {                          // x^2 - d y^2 = -2
            if (r != 1 && r != 3) return false;
        }
    }
    return true;
}

bool yokoi_residue_filter(PolyCase c, const mpz_class& d) {
    std::vector<std::uint32_t> ps;
    mpz_class m = d;
    for (std::uint32_t p : primes_below(1u << 20)) {
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            ps.push_back(p);
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
        }
    }
    PS_CHECK(m == 1, "yokoi_residue_filter: d has a large prime factor; pass its primes instead");
    return yokoi_residue_filter(c, ps);
}

bool yokoi_unit_criterion(PolyCase c, const mpz_class& d, const CompactRep& rep_eta) {
    PS_CHECK(c == PolyCase::x2p2 || c == PolyCase::x2m2, "yokoi_unit_criterion: +-2 cases only");
    PS_CHECK(d % 4 == 2 || d % 4 == 3, "yokoi_unit_criterion: d must be 2,3 (mod 4)");
    EvalResult r = eval_mod(rep_eta, d);
    PS_CHECK(r.two_val == 0, "yokoi_unit_criterion: unit not integral");
    mpz_class t = r.A % d;
    if (t < 0) t += d;
    if (c == PolyCase::x2m2) return t == 1;
    return t == d - 1;
}

unsigned long EquationFamily::eta_exponent(unsigned long m) const {
    PS_CHECK(m >= 1, "EquationFamily: member numbers are 1-based");
    switch (pcase) {
        case PolyCase::x2m1:
            return static_cast<unsigned long>(table_n) * m;
        case PolyCase::x2p1:
            return static_cast<unsigned long>(base_exp) * (2 * m - 1);
        case PolyCase::x2p4odd:
            return (m % 2 == 1) ? 3 * m - 2 : 3 * m - 1;
        case PolyCase::x2m4odd:
            return static_cast<unsigned long>(base_exp) * (m + (m - 1) / 2);
        case PolyCase::x2p2:
            if (d2_special) return 2 * m - 1;  // nu * eta^(2m-1), eta = 1 + sqrt 2
            return m - 1;                      // nu * eta^(m-1)
        case PolyCase::x2m2:
            if (d2_special) return 2 * (m - 1);
            return m - 1;
        default: break;
    }
    throw math_error("eta_exponent: bad case");
}

long EquationFamily::record_index(unsigned long m) const {
    switch (pcase) {
        case PolyCase::x2m1:
            return static_cast<long>(m);
        case PolyCase::x2p1:
            return static_cast<long>(2 * m - 1);
        case PolyCase::x2p4odd:
            return static_cast<long>(eta_exponent(m));
        case PolyCase::x2m4odd:
            return static_cast<long>(m + (m - 1) / 2);
        case PolyCase::x2p2:
        case PolyCase::x2m2:
            return static_cast<long>(m - 1);
        default: break;
    }
    throw math_error("record_index: bad case");
}

unsigned long EquationFamily::member_count(std::uint32_t bound) const {
    if (pcase == PolyCase::x2p2 || pcase == PolyCase::x2m2) return (bound + 1) / 2;
    return bound;
}

std::optional<EquationFamily> classify_unit_family(PolyCase c, const mpz_class& d, int table_n) {
    EquationFamily f;
    f.pcase = c;
    f.d = d;
    f.N = pell_norm(c);
    f.table_n = table_n;
    switch (c) {
        case PolyCase::x2m1:
            f.base_exp = table_n;
            return f;
        case PolyCase::x2p1:
            if (table_n != 2 && table_n != 6) return std::nullopt;
            f.base_exp = table_n / 2;
            return f;
        case PolyCase::x2p4odd:
            if (table_n != 6) return std::nullopt;
            f.base_exp = 1;
            return f;
        case PolyCase::x2m4odd:
            if (table_n != 3 && table_n != 6) return std::nullopt;
            f.base_exp = (table_n == 3) ? 1 : 2;
            return f;
        default:
            throw math_error("classify_unit_family: +-2 cases use classify_two_family");
    }
}

std::optional<EquationFamily> classify_two_family(PolyCase c, const mpz_class& d,
                                                  int solvable_sign) {
    PS_CHECK(c == PolyCase::x2p2 || c == PolyCase::x2m2, "classify_two_family: +-2 cases only");
    EquationFamily f;
    f.pcase = c;
    f.d = d;
    f.N = pell_norm(c);
    f.nu_family = true;
    if (d == 2) {
        f.d2_special = true;
        return f;  // both signs are solvable for d = 2
    }
    if (solvable_sign != f.N) return std::nullopt;
    return f;
}

std::optional<EquationFamily> solvable_small(PolyCase c, const mpz_class& d) {
    if (!d_admissible(c, d)) return std::nullopt;
    if (c == PolyCase::x2p2 || c == PolyCase::x2m2) {
        if (d == 2) return classify_two_family(c, d, pell_norm(c));
        if (!yokoi_residue_filter(c, d)) return std::nullopt;
        return classify_two_family(c, d, half_period_two_test(d));
    }
    return classify_unit_family(c, d, unit_power_index_exact(d));
}

}  // namespace pellsmooth
