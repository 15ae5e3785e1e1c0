#include "pellsmooth/sequences.hpp"

#include "pellsmooth/util.hpp"

namespace pellsmooth {

unsigned long index_bound(SeqKind kind, std::uint32_t bound) {
    PS_CHECK(bound >= 3, "index_bound: bound must be >= 3");
    if (kind == SeqKind::lucas) return bound;
    return (bound + 1) / 2;
}

MemberForm member_form(const EquationFamily& f, unsigned long member) {
    MemberForm mf;
    unsigned long E = f.eta_exponent(member);
    if (f.d2_special) {
        mf.p = E;
        mf.s = 0;
        return mf;
    }
    switch (f.pcase) {
        case PolyCase::x2m1:
        case PolyCase::x2p1:
            mf.p = E;
            mf.s = E;
            break;
        case PolyCase::x2p4odd:
        case PolyCase::x2m4odd:
            mf.p = E;
            mf.s = E - 1;
            break;
        case PolyCase::x2p2:
        case PolyCase::x2m2:
            // nu * eta^E = w_nu^(2E+1) / 2^(3E+1)
            mf.p = 2 * E + 1;
            mf.s = 3 * E + 1;
            break;
        default:
            throw math_error("member_form: composed labels have no families");
    }
    return mf;
}

unsigned long FamilySource::member_from_record(long k) const {
    PS_CHECK(fam != nullptr, "FamilySource: missing family");
    switch (fam->pcase) {
        case PolyCase::x2m1:
            return static_cast<unsigned long>(k);
        case PolyCase::x2p1:
            PS_CHECK(k % 2 == 1, "member_from_record: negative Pell indices are odd");
            return static_cast<unsigned long>((k + 1) / 2);
        case PolyCase::x2p4odd: {
            long r = k % 6;
            PS_CHECK(r == 1 || r == 5, "member_from_record: index must be +-1 (mod 6)");
            return static_cast<unsigned long>(r == 1 ? (k + 2) / 3 : (k + 1) / 3);
        }
        case PolyCase::x2m4odd: {
            long r = k % 3;
            PS_CHECK(r != 0, "member_from_record: index must not be 0 (mod 3)");
            return static_cast<unsigned long>(r == 1 ? (2 * k + 1) / 3 : (2 * k + 2) / 3);
        }
        case PolyCase::x2p2:
        case PolyCase::x2m2:
            return static_cast<unsigned long>(k + 1);
        default: break;
    }
    throw math_error("member_from_record: bad case");
}

namespace {

// Base numerator residues: w = 2*eta (or 2*nu) mod `mod` from a compact rep.
QuadRes base_w_mod(const CompactRep& rep, const mpz_class& mod) {
    EvalResult r = eval_mod(rep, mod);
    if (r.two_val == 1) return {r.A % mod, r.B % mod};
    return {2 * r.A % mod, 2 * r.B % mod};
}

}  // namespace

FamilyTermCursor::FamilyTermCursor(const FamilySource& src, const mpz_class& m,
                                   unsigned long max_member)
    : src_(&src), d_(src.fam->d), m_(m) {
    PS_CHECK(m >= 2, "FamilyTermCursor: modulus must be >= 2");
    const EquationFamily& f = *src.fam;
    MemberForm worst = member_form(f, std::max<unsigned long>(max_member, 1));

    unsigned long v2m = mpz_even_p(m.get_mpz_t()) ? mpz_scan1(m.get_mpz_t(), 0) : 0;
    mpz_class modd = m >> v2m;

    auto base_pair = [&](const mpz_class& mod) -> std::pair<QuadRes, QuadRes> {
        // returns (W, C) residues for the family
        if (f.d2_special) {
            PS_CHECK(f.d == 2, "d2_special family with d != 2");
            return {{1 % mod, 1 % mod}, {2 % mod, 1 % mod}};  // eta = 1+sqrt2, nu = 2+sqrt2
        }
        if (f.nu_family) {
            PS_CHECK(src.rep_nu != nullptr, "FamilyTermCursor: missing nu representation");
            return {base_w_mod(*src.rep_nu, mod), {1 % mod, 0}};
        }
        PS_CHECK(src.rep_eta != nullptr, "FamilyTermCursor: missing unit representation");
        return {base_w_mod(*src.rep_eta, mod), {1 % mod, 0}};
    };

    if (modd > 1) {
        Lane lane;
        lane.mod = modd;
        auto [w, c] = base_pair(modd);
        lane.w = w;
        lane.c = c;
        lane.cur = {1 % modd, 0};
        if (!mpz_invert(lane.inv2.get_mpz_t(), mpz_class(2).get_mpz_t(), modd.get_mpz_t()))
            throw math_error("FamilyTermCursor: 2 not invertible mod odd part");
        lanes_.push_back(std::move(lane));
    }
    if (v2m > 0) {
        Lane lane;
        lane.two_lane = true;
        lane.e2 = v2m;
        lane.mod = mpz_class(1) << (v2m + worst.s + 2);
        auto [w, c] = base_pair(lane.mod);
        lane.w = w;
        lane.c = c;
        lane.cur = {1, 0};
        lanes_.push_back(std::move(lane));
    }
    member_ = 0;
    cur_p_ = 0;
    cur_s_ = 0;
}

void FamilyTermCursor::advance_to(unsigned long member) {
    PS_CHECK(member >= 1 && member >= member_, "FamilyTermCursor: members must be nondecreasing");
    while (member_ < member) {
        ++member_;
        MemberForm mf = member_form(*src_->fam, member_);
        unsigned long dp = mf.p - cur_p_;
        for (Lane& lane : lanes_) {
            for (unsigned long i = 0; i < dp; ++i)
                lane.cur = quad_mul_mod(lane.cur, lane.w, d_, lane.mod);
        }
        cur_p_ = mf.p;
        cur_s_ = mf.s;
    }
}

std::pair<mpz_class, mpz_class> FamilyTermCursor::combine() const {
    // CRT the lanes into residues of (X, Y) mod m.
    mpz_class res_a = 0, res_b = 0, mod = 1;
    auto crt2 = [&](const mpz_class& ra, const mpz_class& rb, const mpz_class& q) {
        if (mod == 1) {
            res_a = ra % q;
            res_b = rb % q;
            mod = q;
            return;
        }
        mpz_class minv;
        PS_CHECK(mpz_invert(minv.get_mpz_t(), mpz_class(mod % q).get_mpz_t(), q.get_mpz_t()),
                 "FamilyTermCursor: CRT moduli not coprime");
        mpz_class t = (ra - res_a) % q * minv % q;
        if (t < 0) t += q;
        res_a += mod * t;
        t = (rb - res_b) % q * minv % q;
        if (t < 0) t += q;
        res_b += mod * t;
        mod *= q;
    };
    for (const Lane& lane : lanes_) {
        QuadRes v = quad_mul_mod(lane.c, lane.cur, d_, lane.mod);
        if (!lane.two_lane) {
            mpz_class shift = 1;
            if (cur_s_ > 0) {
                mpz_class e(cur_s_);
                mpz_powm(shift.get_mpz_t(), lane.inv2.get_mpz_t(), e.get_mpz_t(),
                         lane.mod.get_mpz_t());
            }
            crt2(v.a * shift % lane.mod, v.b * shift % lane.mod, lane.mod);
        } else {
            mpz_class m2 = mpz_class(1) << lane.e2;
            mpz_class a = v.a, b = v.b;
            if (cur_s_ > 0) {
                if ((a != 0 && mpz_scan1(a.get_mpz_t(), 0) < cur_s_) ||
                    (b != 0 && mpz_scan1(b.get_mpz_t(), 0) < cur_s_))
                    throw math_error("FamilyTermCursor: 2-adic shift not exact");
                a >>= cur_s_;
                b >>= cur_s_;
            }
            crt2(a % m2, b % m2, m2);
        }
    }
    return {res_a, res_b};
}

std::pair<mpz_class, mpz_class> FamilyTermCursor::term(unsigned long member) {
    advance_to(member);
    return combine();
}

void y_scan_mod(const FamilySource& src, const mpz_class& m, unsigned long k_max,
                const std::function<bool(long, const mpz_class&)>& emit) {
    FamilyTermCursor cur(src, m, k_max);
    for (unsigned long mem = 1; mem <= k_max; ++mem) {
        if (!emit(src.fam->record_index(mem), cur.y(mem))) return;
    }
}

std::pair<mpz_class, mpz_class> term_mod(const FamilySource& src, long record_k,
                                         const mpz_class& m) {
    unsigned long member = src.member_from_record(record_k);
    const EquationFamily& f = *src.fam;
    MemberForm mf = member_form(f, member);

    unsigned long v2m = mpz_even_p(m.get_mpz_t()) ? mpz_scan1(m.get_mpz_t(), 0) : 0;
    mpz_class modd = m >> v2m;

    mpz_class res_a = 0, res_b = 0, mod = 1;
    auto crt2 = [&](const mpz_class& ra, const mpz_class& rb, const mpz_class& q) {
        if (mod == 1) {
            res_a = ra % q;
            res_b = rb % q;
            mod = q;
            return;
        }
        mpz_class minv;
        PS_CHECK(mpz_invert(minv.get_mpz_t(), mpz_class(mod % q).get_mpz_t(), q.get_mpz_t()),
                 "term_mod: CRT moduli not coprime");
        mpz_class t = (ra - res_a) % q * minv % q;
        if (t < 0) t += q;
        res_a += mod * t;
        t = (rb - res_b) % q * minv % q;
        if (t < 0) t += q;
        res_b += mod * t;
        mod *= q;
    };

    auto bases = [&](const mpz_class& lane_mod) -> std::pair<QuadRes, QuadRes> {
        if (f.d2_special) return {{1 % lane_mod, 1 % lane_mod}, {2 % lane_mod, 1 % lane_mod}};
        if (f.nu_family) {
            PS_CHECK(src.rep_nu != nullptr, "term_mod: missing nu representation");
            return {base_w_mod(*src.rep_nu, lane_mod), {1 % lane_mod, 0}};
        }
        PS_CHECK(src.rep_eta != nullptr, "term_mod: missing unit representation");
        return {base_w_mod(*src.rep_eta, lane_mod), {1 % lane_mod, 0}};
    };

    if (modd > 1) {
        auto [w, c] = bases(modd);
        QuadRes v = quad_pow_mod(w, mpz_class(mf.p), f.d, modd);
        v = quad_mul_mod(v, c, f.d, modd);
        mpz_class inv2;
        PS_CHECK(mpz_invert(inv2.get_mpz_t(), mpz_class(2).get_mpz_t(), modd.get_mpz_t()),
                 "term_mod: 2 not invertible");
        mpz_class sh;
        mpz_class e(static_cast<unsigned long>(mf.s));
        mpz_powm(sh.get_mpz_t(), inv2.get_mpz_t(), e.get_mpz_t(), modd.get_mpz_t());
        crt2(v.a * sh % modd, v.b * sh % modd, modd);
    }
    if (v2m > 0) {
        mpz_class lane_mod = mpz_class(1) << (v2m + mf.s + 2);
        auto [w, c] = bases(lane_mod);
        QuadRes v = quad_pow_mod(w, mpz_class(mf.p), f.d, lane_mod);
        v = quad_mul_mod(v, c, f.d, lane_mod);
        mpz_class a = v.a, b = v.b;
        if (mf.s > 0) {
            if ((a != 0 && mpz_scan1(a.get_mpz_t(), 0) < mf.s) ||
                (b != 0 && mpz_scan1(b.get_mpz_t(), 0) < mf.s))
                throw math_error("term_mod: 2-adic shift not exact");
            a >>= mf.s;
            b >>= mf.s;
        }
        mpz_class m2 = mpz_class(1) << v2m;
        crt2(a % m2, b % m2, m2);
    }
    return {res_a, res_b};
}

}  // namespace pellsmooth
