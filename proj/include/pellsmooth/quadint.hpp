#pragma once

#include <gmpxx.h>

#include <string>

namespace pellsmooth {

// Element (a + b*sqrt(d))/s of a real quadratic field; the universal value
// type for units and Pell solutions. s = 2 is only allowed for d = 1 (mod 4)
// with a = b (mod 2), so values are always algebraic integers.
struct QuadInt {
    mpz_class a;
    mpz_class b;
    int s = 1;
    mpz_class d;

    QuadInt() = default;
    QuadInt(mpz_class a_, mpz_class b_, int s_, mpz_class d_);

    static QuadInt one(const mpz_class& d) { return QuadInt(1, 0, 1, d); }

    // (a^2 - d b^2) / s^2, always an integer.
    mpz_class norm() const;
    QuadInt conj() const;
    QuadInt operator*(const QuadInt& o) const;
    QuadInt pow(unsigned long e) const;
    bool operator==(const QuadInt& o) const;

    // True iff the value lies in Z[sqrt(d)] (s reduces to 1).
    bool integral_coords() const { return s == 1; }

    double log_approx() const;
    std::string str() const;

  private:
    void normalize();
};

// Residues of an element of Z[sqrt(d)] modulo m.
struct QuadRes {
    mpz_class a;
    mpz_class b;
};

// Product in Z[sqrt(d)]/(m). Radicands must match; operands need not be
// pre-reduced.
QuadRes quad_mul_mod(const QuadRes& x, const QuadRes& y, const mpz_class& d, const mpz_class& m);

QuadRes quad_pow_mod(const QuadRes& x, const mpz_class& e, const mpz_class& d, const mpz_class& m);

}  // namespace pellsmooth
