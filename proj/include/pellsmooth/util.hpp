#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace pellsmooth {

using i128 = __int128;
using u128 = unsigned __int128;

// Thrown when an internal mathematical invariant fails. A run that hits one
// of these must abort: the result set can no longer be trusted.
struct math_error : std::runtime_error {
    explicit math_error(const std::string& what) : std::runtime_error(what) {}
};

// Bad caller input (CLI maps these to exit code 2).
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

// A configured method ran out of road (regulator ceiling, digit caps, ...).
struct limit_error : std::runtime_error {
    explicit limit_error(const std::string& what) : std::runtime_error(what) {}
};

#define PS_CHECK(cond, msg)                                   \
    do {                                                      \
        if (!(cond)) throw ::pellsmooth::math_error(msg);     \
    } while (0)

inline i128 to_i128(const mpz_class& z) {
    bool neg = z < 0;
    mpz_class a = neg ? mpz_class(-z) : z;
    if (mpz_sizeinbase(a.get_mpz_t(), 2) > 126)
        throw math_error("to_i128: value does not fit in 126 bits");
    u128 lo = mpz_getlimbn(a.get_mpz_t(), 0);
    u128 hi = mpz_size(a.get_mpz_t()) > 1 ? mpz_getlimbn(a.get_mpz_t(), 1) : 0;
    u128 v = (hi << 64) | lo;
    return neg ? -static_cast<i128>(v) : static_cast<i128>(v);
}

inline mpz_class from_i128(i128 v) {
    bool neg = v < 0;
    u128 a = neg ? static_cast<u128>(-v) : static_cast<u128>(v);
    mpz_class hi(static_cast<unsigned long>(a >> 64));
    mpz_class lo(static_cast<unsigned long>(a & 0xffffffffffffffffULL));
    mpz_class z = (hi << 64) | lo;
    return neg ? mpz_class(-z) : z;
}

inline i128 gcd_i128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Extended gcd: g = gcd(a,b) >= 0 with u*a + v*b = g.
inline i128 gcdext_i128(i128 a, i128 b, i128& u, i128& v) {
    i128 u0 = 1, v0 = 0, u1 = 0, v1 = 1;
    i128 a0 = a, b0 = b;
    while (b0) {
        i128 q = a0 / b0;
        i128 t;
        t = a0 - q * b0; a0 = b0; b0 = t;
        t = u0 - q * u1; u0 = u1; u1 = t;
        t = v0 - q * v1; v0 = v1; v1 = t;
    }
    if (a0 < 0) { a0 = -a0; u0 = -u0; v0 = -v0; }
    u = u0;
    v = v0;
    return a0;
}

// Floor division (C++ integer division truncates toward zero).
inline i128 fdiv_i128(i128 a, i128 b) {
    i128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline double log_i128(i128 v) {
    if (v < 0) v = -v;
    u128 a = static_cast<u128>(v);
    if (a >> 64)
        return std::log(static_cast<double>(static_cast<std::uint64_t>(a >> 64))) + 64.0 * 0.6931471805599453 +
               std::log1p(static_cast<double>(static_cast<std::uint64_t>(a)) /
                          (static_cast<double>(static_cast<std::uint64_t>(a >> 64)) * 18446744073709551616.0));
    return std::log(static_cast<double>(static_cast<std::uint64_t>(a)));
}

inline std::string i128_to_string(i128 v) { return from_i128(v).get_str(); }

// Minimal RAII MPFR real. Precision is fixed at construction.
class Real {
  public:
    explicit Real(mpfr_prec_t prec = 128) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
    Real(const Real& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        if (this != &o) mpfr_swap(x_, o.x_);
        return *this;
    }
    ~Real() { mpfr_clear(x_); }

    mpfr_ptr get() { return x_; }
    mpfr_srcptr get() const { return x_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(x_); }

    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

    void set(double v) { mpfr_set_d(x_, v, MPFR_RNDN); }
    void set(const mpz_class& v) { mpfr_set_z(x_, v.get_mpz_t(), MPFR_RNDN); }

    Real& operator+=(const Real& o) { mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }

    static Real log_of(const mpz_class& v, mpfr_prec_t prec) {
        Real r(prec);
        Real t(prec);
        t.set(v);
        mpfr_log(r.x_, t.x_, MPFR_RNDN);
        return r;
    }

    std::string str(int digits = 20) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, x_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

  private:
    mpfr_t x_;
};

}  // namespace pellsmooth
