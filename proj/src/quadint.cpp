#include "pellsmooth/quadint.hpp"

#include <cmath>

#include "pellsmooth/util.hpp"

namespace pellsmooth {

QuadInt::QuadInt(mpz_class a_, mpz_class b_, int s_, mpz_class d_)
    : a(std::move(a_)), b(std::move(b_)), s(s_), d(std::move(d_)) {
    PS_CHECK(d >= 2, "QuadInt: radicand must be >= 2");
    PS_CHECK(s == 1 || s == 2, "QuadInt: denominator must be 1 or 2");
    normalize();
    if (s == 2) {
        PS_CHECK(d % 4 == 1, "QuadInt: s = 2 requires d = 1 (mod 4)");
        PS_CHECK((a - b) % 2 == 0, "QuadInt: s = 2 requires a = b (mod 2)");
    }
}

void QuadInt::normalize() {
    if (s == 2 && mpz_even_p(a.get_mpz_t()) && mpz_even_p(b.get_mpz_t())) {
        a >>= 1;
        b >>= 1;
        s = 1;
    }
}

mpz_class QuadInt::norm() const {
    mpz_class n = a * a - d * b * b;
    if (s == 2) {
        PS_CHECK(n % 4 == 0, "QuadInt::norm: not an algebraic integer");
        n /= 4;
    }
    return n;
}

QuadInt QuadInt::conj() const { return QuadInt(a, -b, s, d); }

QuadInt QuadInt::operator*(const QuadInt& o) const {
    PS_CHECK(d == o.d, "QuadInt: mismatched radicands");
    mpz_class na = a * o.a + d * b * o.b;
    mpz_class nb = a * o.b + b * o.a;
    int ns = s * o.s;
    if (ns == 4) {
        PS_CHECK(na % 2 == 0 && nb % 2 == 0, "QuadInt: product left the order");
        na >>= 1;
        nb >>= 1;
        ns = 2;
    }
    return QuadInt(na, nb, ns, d);
}

QuadInt QuadInt::pow(unsigned long e) const {
    QuadInt r = QuadInt::one(d);
    QuadInt base = *this;
    while (e) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool QuadInt::operator==(const QuadInt& o) const {
    return d == o.d && s == o.s && a == o.a && b == o.b;
}

double QuadInt::log_approx() const {
    // log |a + b sqrt(d)| - log s, stable against cancellation via the norm.
    double ld = 0.5 * std::log(mpz_get_d(d.get_mpz_t()));
    auto logz = [](const mpz_class& z) {
        signed long e;
        double m = mpz_get_d_2exp(&e, z.get_mpz_t());
        return std::log(std::fabs(m)) + 0.6931471805599453 * static_cast<double>(e);
    };
    if (a == 0) return logz(b) + ld - std::log(static_cast<double>(s));
    if (b == 0) return logz(a) - std::log(static_cast<double>(s));
    if ((a > 0) == (b > 0)) {
        // No cancellation: |a| + |b| sqrt(d) dominates.
        double va = logz(a), vb = logz(b) + ld;
        double hi = std::max(va, vb), lo = std::min(va, vb);
        return hi + std::log1p(std::exp(lo - hi)) - std::log(static_cast<double>(s));
    }
    // Opposite signs: |a + b sqrt d| = |a^2 - d b^2| / |a - b sqrt d|.
    mpz_class n = a * a - d * b * b;
    double va = logz(a), vb = logz(b) + ld;
    double hi = std::max(va, vb), lo = std::min(va, vb);
    double denom = hi + std::log1p(std::exp(lo - hi));
    return logz(n) - denom - std::log(static_cast<double>(s));
}

std::string QuadInt::str() const {
    std::string out = "(" + a.get_str() + (b >= 0 ? "+" : "") + b.get_str() + "*sqrt(" + d.get_str() + "))";
    if (s == 2) out += "/2";
    return out;
}

QuadRes quad_mul_mod(const QuadRes& x, const QuadRes& y, const mpz_class& d, const mpz_class& m) {
    PS_CHECK(m >= 2, "quad_mul_mod: modulus must be >= 2");
    QuadRes r;
    r.a = (x.a * y.a + d % m * x.b % m * y.b) % m;
    r.b = (x.a * y.b + x.b * y.a) % m;
    if (r.a < 0) r.a += m;
    if (r.b < 0) r.b += m;
    return r;
}

QuadRes quad_pow_mod(const QuadRes& x, const mpz_class& e, const mpz_class& d, const mpz_class& m) {
    PS_CHECK(e >= 0, "quad_pow_mod: exponent must be >= 0");
    QuadRes r{1 % m, 0};
    QuadRes base{x.a % m, x.b % m};
    if (base.a < 0) base.a += m;
    if (base.b < 0) base.b += m;
    mpz_class k = e;
    while (k > 0) {
        if (mpz_odd_p(k.get_mpz_t())) r = quad_mul_mod(r, base, d, m);
        base = quad_mul_mod(base, base, d, m);
        k >>= 1;
    }
    return r;
}

}  // namespace pellsmooth
