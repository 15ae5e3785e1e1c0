#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "pellsmooth/compactrep.hpp"
#include "pellsmooth/pellsolve.hpp"

namespace pellsmooth {

enum class SeqKind { lucas, lehmer };

inline SeqKind seq_kind(const EquationFamily& f) {
    return (f.N == 2 || f.N == -2) ? SeqKind::lehmer : SeqKind::lucas;
}

// Number of family members that can possibly be B-smooth: primitive divisors
// cap Lucas-type scans at B solutions and Lehmer-type scans at the first
// ceil(B/2) odd members.
unsigned long index_bound(SeqKind kind, std::uint32_t bound);

// An equation family together with the compact representations needed to
// evaluate its members modulo anything.
struct FamilySource {
    const EquationFamily* fam = nullptr;
    const CompactRep* rep_eta = nullptr;  // unused for d = 2 special families
    const CompactRep* rep_nu = nullptr;   // +-2 families, d != 2

    unsigned long member_from_record(long record_k) const;
};

// Residues (X mod m, Y mod m) of the family member with the given record
// index. m >= 2, arbitrary.
std::pair<mpz_class, mpz_class> term_mod(const FamilySource& src, long record_k,
                                         const mpz_class& m);

// Incremental member-by-member evaluation modulo a fixed m: one generator
// multiplication per step. Members are 1-based and must be visited in
// increasing order.
class FamilyTermCursor {
  public:
    FamilyTermCursor(const FamilySource& src, const mpz_class& m, unsigned long max_member);

    // Advance to `member` (>= current) and return (X, Y) mod m.
    std::pair<mpz_class, mpz_class> term(unsigned long member);
    // Y component only.
    mpz_class y(unsigned long member) { return term(member).second; }

  private:
    struct Lane {
        mpz_class mod;        // odd modulus or 2^E
        bool two_lane = false;
        unsigned long e2 = 0;  // output precision of the two-lane
        QuadRes w;             // base numerator
        QuadRes cur;           // w^(p(member))
        QuadRes c;             // constant prefactor
        mpz_class inv2;        // odd lane only
    };

    void advance_to(unsigned long member);
    std::pair<mpz_class, mpz_class> combine() const;

    const FamilySource* src_;
    mpz_class d_;
    mpz_class m_;
    std::vector<Lane> lanes_;
    unsigned long member_ = 0;
    unsigned long cur_p_ = 0;
    unsigned long cur_s_ = 0;
};

// Incremental Y-component stream: emits (record index, Y mod m) for the
// first k_max members, one generator multiplication per step. The callback
// returns false to stop early.
void y_scan_mod(const FamilySource& src, const mpz_class& m, unsigned long k_max,
                const std::function<bool(long, const mpz_class&)>& emit);

// Exponent bookkeeping shared by the cursor and one-shot evaluation:
// member value = C * W^p / 2^s in Z[sqrt d].
struct MemberForm {
    unsigned long p = 0;
    unsigned long s = 0;
};
MemberForm member_form(const EquationFamily& f, unsigned long member);

}  // namespace pellsmooth
