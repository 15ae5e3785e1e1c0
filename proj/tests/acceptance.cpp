// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Heavy criteria honor --workers; --only N runs a single criterion.

#include <chrono>
#include <cmath>
#include <random>
#include <atomic>
#include <mutex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "pellsmooth/cf.hpp"
#include "pellsmooth/compactrep.hpp"
#include "pellsmooth/oracle.hpp"
#include "pellsmooth/pellsolve.hpp"
#include "pellsmooth/primes.hpp"
#include "pellsmooth/regulator.hpp"
#include "pellsmooth/search.hpp"
#include "pellsmooth/sequences.hpp"
#include "pellsmooth/smoothness.hpp"
#include "pellsmooth/util.hpp"

using namespace pellsmooth;

namespace {

unsigned g_workers = std::max(2u, std::thread::hardware_concurrency());

struct CheckCtx {
    std::ostringstream log;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "    FAILED: " << what << "\n";
        }
    }
    template <class A, class B>
    void expect_eq(const A& a, const B& b, const std::string& what) {
        if (!(a == b)) {
            ok = false;
            log << "    FAILED: " << what << " (got " << a << ", want " << b << ")\n";
        }
    }
};

bool squarefree_small(unsigned long n) {
    for (unsigned long p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0) return false;
    return true;
}

bool is_square_ul(unsigned long n) {
    unsigned long r = static_cast<unsigned long>(std::sqrt(static_cast<double>(n)));
    for (unsigned long t = r > 1 ? r - 1 : 0; t <= r + 1; ++t)
        if (t * t == n) return true;
    return false;
}

// Parallel sweep over squarefree non-square d in [2, limit].
void for_each_d(unsigned long limit, const std::function<void(unsigned long)>& fn) {
    std::atomic<unsigned long> next{2};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        try {
            for (;;) {
                unsigned long n = next.fetch_add(1);
                if (n > limit) return;
                if (!squarefree_small(n) || is_square_ul(n)) continue;
                fn(n);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!err) err = std::current_exception();
        }
    };
    std::vector<std::thread> ts;
    for (unsigned w = 0; w < g_workers; ++w) ts.emplace_back(worker);
    for (auto& t : ts) t.join();
    if (err) std::rethrow_exception(err);
}

SearchConfig make_config(PolyCase c, std::uint32_t bound, unsigned workers = 0) {
    SearchConfig cfg;
    cfg.pcase = c;
    cfg.bound = bound;
    cfg.workers = workers ? workers : g_workers;
    cfg.finalize();
    return cfg;
}

// ---------------------------------------------------------------- criterion 1
bool crit1(CheckCtx& c) {
    SearchConfig cfg = make_config(PolyCase::x2m1, 42);
    mpz_class maxd = 0;
    std::size_t subsets = 0;
    enumerate_d(cfg, [&](std::uint64_t, const mpz_class& d) {
        ++subsets;
        if (d > maxd) maxd = d;
        return true;
    });
    c.expect_eq(subsets, std::size_t(8191), "8191 subsets at bound 42");
    c.expect(maxd == mpz_class("304250263527210"), "largest radicand 304250263527210");

    ResultSet rs = run(cfg);
    c.expect(rs.complete(), "run completes with no skipped radicands over the ceiling");
    std::size_t odd = 0;
    for (const auto& r : rs.records)
        if (mpz_odd_p(r.x.get_mpz_t())) ++odd;
    // Solutions of P(x(x+1)) <= 41 correspond one-to-one to odd x >= 3 with
    // x^2-1 42-smooth (x = 2t+1). The count convention is x >= 1 with
    // f(x) >= 1, so x = 1 (f = 0) is outside every set compared here.
    c.expect_eq(odd, std::size_t(869), "869 odd solutions (Lehmer reproduction)");
    c.log << "    records total " << rs.records.size() << ", odd " << odd << "\n";
    return c.ok;
}

// ---------------------------------------------------------------- criterion 2
bool crit2(CheckCtx& c) {
    SearchConfig cfg = make_config(PolyCase::x2p1, 100);
    std::size_t subsets = 0;
    enumerate_d(cfg, [&](std::uint64_t, const mpz_class&) {
        ++subsets;
        return true;
    });
    c.expect_eq(subsets, std::size_t(4095), "4095 subsets at bound 100");
    ResultSet rs = run(cfg);
    c.expect(rs.complete(), "run completes with no skipped radicands");
    c.expect_eq(rs.records.size(), std::size_t(156), "156 solutions (Luca reproduction)");
    return c.ok;
}

// ---------------------------------------------------------------- criterion 3
bool crit3(CheckCtx& c) {
    struct Item {
        PolyCase pc;
        std::uint32_t B;
        unsigned long d;
        std::size_t count;
        long maxk;  // 0 = don't check
    };
    const Item items[] = {
        {PolyCase::x2p1, 200, 5, 4, 9},
        {PolyCase::x2p4odd, 200, 5, 5, 19},
        {PolyCase::x2m4odd, 100, 5, 7, 10},
        {PolyCase::x2p2, 200, 3, 6, 0},
        {PolyCase::x2m2, 200, 2, 5, 7},
    };
    for (const auto& it : items) {
        SearchConfig cfg = make_config(it.pc, it.B);
        SkipReason skip;
        auto recs = process_d(cfg, mpz_class(it.d), &skip);
        std::string tag = case_label(it.pc) + " B=" + std::to_string(it.B) +
                          " d=" + std::to_string(it.d);
        c.expect(skip == SkipReason::none, tag + " not skipped");
        c.expect_eq(recs.size(), it.count, tag + " solution count");
        if (it.pc == PolyCase::x2p2 && recs.size() != it.count) {
            c.log << "    note: the exact member scan and the brute force below 1e7 both give "
                  << recs.size() << " solutions at d=3 (x = 1, 5, 19, 71, 265); the reference"
                  << " count of 6 is not attainable (see the project notes)\n";
        }
        long maxk = 0;
        for (const auto& r : recs) maxk = std::max(maxk, r.k);
        if (it.maxk) c.expect_eq(maxk, it.maxk, tag + " max power index");
    }
    return c.ok;
}

// ---------------------------------------------------------------- criterion 4
bool crit4(CheckCtx& c) {
    struct Item {
        PolyCase pc;
        std::uint32_t B;
        const char* x;
    };
    const Item items[] = {
        {PolyCase::x2p1, 200, "69971515635443"},
        {PolyCase::x2p1, 200, "120563046313"},
        {PolyCase::x2p1, 200, "104279454193"},
        {PolyCase::x2p4odd, 200, "191686681859"},
        {PolyCase::x2p4odd, 200, "112899039159"},
        {PolyCase::x2p4odd, 200, "28608252345"},
        {PolyCase::x2m4odd, 100, "407479035814853"},
        {PolyCase::x2m4odd, 100, "335682488669673"},
        {PolyCase::x2m4odd, 100, "250734674482437"},
        {PolyCase::x2p2, 200, "9575480365630"},
        {PolyCase::x2p2, 200, "14629598023"},
        {PolyCase::x2p2, 200, "8850900308"},
        {PolyCase::x2m2, 200, "324850200677887"},
        {PolyCase::x2m2, 200, "1600947755823"},
        {PolyCase::x2m2, 200, "494400410248"},
    };
    for (const auto& it : items) {
        mpz_class x(it.x);
        mpz_class fx = case_value(it.pc, x);
        auto fac = trial_factor_smooth(fx, it.B);
        std::string tag = case_label(it.pc) + " x=" + std::string(it.x);
        c.expect(fac.has_value(), tag + " trial division confirms smoothness");
        if (!fac) continue;

        std::map<mpz_class, unsigned> conv;
        for (const auto& [p, e] : *fac) conv[mpz_class(static_cast<unsigned long>(p))] = e;
        mpz_class d = squarefree_part(conv);
        SearchConfig cfg = make_config(it.pc, it.B, 1);
        cfg.d_ceiling = mpz_class("100000000000000000000000000");  // 10^26
        SkipReason skip;
        auto recs = process_d(cfg, d, &skip);
        bool found = false;
        for (const auto& r : recs) found = found || (r.x == x);
        c.expect(skip == SkipReason::none && found, tag + " found by the pipeline at its d");
    }
    return c.ok;
}

// ---------------------------------------------------------------- criterion 5
bool crit5(CheckCtx& c) {
    const PolyCase cases[] = {PolyCase::x2m1, PolyCase::x2p1, PolyCase::x2p2,
                              PolyCase::x2m2, PolyCase::x2p4odd, PolyCase::x2m4odd};
    for (PolyCase pc : cases) {
        for (std::uint32_t B : {10u, 42u, 50u}) {
            SearchConfig cfg = make_config(pc, B);
            ResultSet rs = run(cfg);
            OracleReport rep = cross_validate(rs, 10000000ULL, g_workers);
            std::string tag = case_label(pc) + " B=" + std::to_string(B);
            c.expect(rep.clean(), tag + " zero oracle mismatches");
            if (!rep.clean()) c.log << rep.text();
            c.log << "    " << tag << ": " << rep.oracle_count << " solutions <= 1e7\n";
        }
    }
    return c.ok;
}

// ---------------------------------------------------------------- criterion 6
bool crit6(CheckCtx& c) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    auto lap = [&](const char* name) {
        auto t1 = clock::now();
        c.log << "    " << name << ": "
              << std::chrono::duration_cast<std::chrono::seconds>(t1 - t0).count() << "s\n";
        t0 = t1;
    };

    // (a) classification totality + eta^n identity, squarefree d <= 1e5
    {
        std::atomic<bool> ok{true};
        for_each_d(100000, [&](unsigned long n) {
            mpz_class d(n);
            int tn = unit_power_index_exact(d);
            QuadInt eta = fundamental_unit(d);
            auto pell = pell_fundamental(d);
            QuadInt p = eta.pow(static_cast<unsigned long>(tn));
            mpz_class X = pell.x, Y = pell.y;
            if (pell.norm == -1) {
                X = pell.x * pell.x + d * pell.y * pell.y;
                Y = 2 * pell.x * pell.y;
            }
            bool good = (p.s == 1 && p.a == X && p.b == Y);
            good = good && (pell.norm == ((tn == 2 || tn == 6) ? -1 : 1));
            if ((tn == 3 || tn == 6) && n % 8 != 5) good = false;
            if (!good) ok = false;
        });
        c.expect(ok.load(), "classification totality and eta^n identity for d <= 1e5");
        lap("totality + eta^n");
    }

    // (b) Perron exclusivity, d <= 1e5
    {
        std::atomic<bool> ok{true};
        for_each_d(100000, [&](unsigned long n) {
            if (n == 2) return;
            mpz_class d(n);
            int cnt = (cf_expand(d).l % 2 == 1) ? 1 : 0;
            if (n % 4 == 2 || n % 4 == 3)
                if (half_period_two_test(d) != 0) ++cnt;
            if (cnt > 1) ok = false;
        });
        c.expect(ok.load(), "Perron exclusivity for d <= 1e5");
        lap("perron");
    }

    // (c) Yokoi unit criterion == half-period test, d = 2,3 (mod 4), d <= 1e5
    {
        std::atomic<bool> ok{true};
        for_each_d(100000, [&](unsigned long n) {
            if (n % 4 != 2 && n % 4 != 3) return;
            if (n == 2) return;
            mpz_class d(n);
            int hp = half_period_two_test(d);
            FieldCtx ctx(d);
            Regulator reg = regulator(ctx, 0, {});
            CompactRep rep = build_compact(ctx, reg);
            bool plus = yokoi_unit_criterion(PolyCase::x2m2, d, rep);
            bool minus = yokoi_unit_criterion(PolyCase::x2p2, d, rep);
            if (plus != (hp == 2) || minus != (hp == -2)) ok = false;
        });
        c.expect(ok.load(), "Yokoi criterion == half-period test for d <= 1e5");
        lap("yokoi");
    }

    // (d) compact representation round-trip + modular consistency, d <= 1e4
    {
        std::atomic<bool> ok{true};
        for_each_d(10000, [&](unsigned long n) {
            mpz_class d(n);
            FieldCtx ctx(d);
            Regulator reg = regulator(ctx, 0, {});
            CompactRep rep = build_compact(ctx, reg);
            QuadInt eta = fundamental_unit(d);
            if (!(expand_exact(rep, 500000) == eta)) {
                ok = false;
                return;
            }
            if (std::fabs(reg.dvalue - eta.log_approx()) > 1e-8) {
                ok = false;
                return;
            }
            mpz_class wa = eta.s == 2 ? eta.a : eta.a * 2;
            mpz_class wb = eta.s == 2 ? eta.b : eta.b * 2;
            std::mt19937_64 rng(n);
            for (int t = 0; t < 50; ++t) {
                mpz_class m;
                if (t % 5 == 0)
                    m = mpz_class(1) << (1 + static_cast<int>(rng() % 18));
                else if (t % 5 == 1 && !rep.terms.empty())
                    m = rep.terms[rng() % rep.terms.size()].dj * (1 + rng() % 4096);
                else
                    m = mpz_class(static_cast<unsigned long>((rng() % ((1ULL << 63) - 2)) + 2));
                if (m < 2) m = 2;
                EvalResult got = eval_mod(rep, m);
                mpz_class ga = got.two_val == 1 ? got.A : 2 * got.A;
                mpz_class gb = got.two_val == 1 ? got.B : 2 * got.B;
                if (((ga - wa) % m != 0) || ((gb - wb) % m != 0)) {
                    ok = false;
                    return;
                }
            }
        });
        c.expect(ok.load(), "compact representation round-trip and modular consistency, d <= 1e4");
        lap("compact round-trip");
    }

    // (e) sequence residues == exact members, d <= 1e3, members <= 20
    {
        std::atomic<bool> ok{true};
        for_each_d(1000, [&](unsigned long n) {
            mpz_class d(n);
            for (PolyCase pc : {PolyCase::x2m1, PolyCase::x2p1, PolyCase::x2p2, PolyCase::x2m2,
                                PolyCase::x2p4odd, PolyCase::x2m4odd}) {
                auto fam = solvable_small(pc, d);
                if (!fam) continue;
                CompactRep rep_eta, rep_nu;
                FamilySource src;
                src.fam = &*fam;
                if (!fam->d2_special) {
                    FieldCtx ctx(d);
                    Regulator reg = regulator(ctx, 0, {});
                    rep_eta = build_compact(ctx, reg);
                    src.rep_eta = &rep_eta;
                    if (fam->nu_family) {
                        rep_nu = build_compact_nu(ctx, reg);
                        src.rep_nu = &rep_nu;
                    }
                }
                QuadInt eta = fundamental_unit(d);
                std::mt19937_64 rng(n * 7 + static_cast<int>(pc));
                for (unsigned long mem = 1; mem <= 20; mem += 3) {
                    QuadInt v = eta.pow(fam->eta_exponent(mem));
                    mpz_class X, Y;
                    if (fam->nu_family) {
                        QuadInt nu = (n == 2) ? QuadInt(2, 1, 1, d)
                                              : QuadInt(two_fundamental(d).x,
                                                        two_fundamental(d).y, 1, d);
                        QuadInt t = nu * v;
                        X = t.a;
                        Y = t.b;
                    } else {
                        X = v.a;
                        Y = v.b;
                    }
                    for (int t = 0; t < 20; ++t) {
                        mpz_class m = (t % 4 == 0)
                                          ? mpz_class(1) << (1 + static_cast<int>(rng() % 14))
                                          : mpz_class(static_cast<unsigned long>(2 + rng() % 999983));
                        auto got = term_mod(src, fam->record_index(mem), m);
                        if (got.first != X % m || got.second != Y % m) {
                            ok = false;
                            return;
                        }
                    }
                }
            }
        });
        c.expect(ok.load(), "sequence residues match exact members, d <= 1e3");
        lap("sequences vs exact");
    }

    // (f) empirical primitive divisors, 12 < n <= 30, d <= 1e3
    {
        std::atomic<bool> ok{true};
        for_each_d(1000, [&](unsigned long n) {
            mpz_class d(n);
            auto pell = pell_fundamental(d);
            QuadInt eps(pell.x, pell.y, 1, d);
            if (pell.norm == -1) eps = eps * eps;
            std::vector<mpz_class> u;
            {
                QuadInt p = QuadInt::one(d);
                std::vector<mpz_class> Y;
                for (int i = 1; i <= 30; ++i) {
                    p = p * eps;
                    Y.push_back(p.b);
                }
                for (auto& y : Y) u.push_back(y / Y[0]);
            }
            for (int m = 13; m <= 30; ++m) {
                mpz_class g = u[m - 1];
                for (int j = 1; j < m; ++j) {
                    mpz_class cg;
                    mpz_gcd(cg.get_mpz_t(), g.get_mpz_t(), u[j - 1].get_mpz_t());
                    while (cg > 1) {
                        g /= cg;
                        mpz_gcd(cg.get_mpz_t(), g.get_mpz_t(), cg.get_mpz_t());
                    }
                }
                mpz_class deg = 2 * d * eps.b, cg;
                mpz_gcd(cg.get_mpz_t(), g.get_mpz_t(), deg.get_mpz_t());
                while (cg > 1) {
                    g /= cg;
                    mpz_gcd(cg.get_mpz_t(), g.get_mpz_t(), cg.get_mpz_t());
                }
                mpz_class r = g % m;
                if (!(g > 1 && (r == 1 || r == m - 1))) {
                    ok = false;
                    return;
                }
            }
        });
        c.expect(ok.load(), "primitive divisors with +-1 residues, 12 < n <= 30, d <= 1e3");
        lap("primitive divisors");
    }
    return c.ok;
}

// ---------------------------------------------------------------- criterion 7
bool crit7(CheckCtx& c) {
    struct Item {
        PolyCase pc;
        std::uint32_t B;
        std::size_t paper_count;
        const char* ceiling;
    };
    // Full bound-200 (and -4: bound-100) runs exceed the unconditional
    // regulator's reach, so they are run with an explicit ceiling and must
    // finish with a skipped-d ledger; whatever they emit must verify by
    // trial division and stay within the full counts.
    const Item items[] = {
        {PolyCase::x2p1, 200, 811, "10000000000"},
        {PolyCase::x2p4odd, 200, 344, "10000000000"},
        {PolyCase::x2m4odd, 100, 2846, "10000000000"},
        {PolyCase::x2p2, 200, 914, "10000000000"},
        {PolyCase::x2m2, 200, 537, "10000000000"},
    };
    for (const auto& it : items) {
        SearchConfig cfg = make_config(it.pc, it.B);
        cfg.d_ceiling = mpz_class(it.ceiling);
        ResultSet rs = run(cfg);
        std::string tag = case_label(it.pc) + " B=" + std::to_string(it.B);
        c.expect(!rs.halted, tag + " run completes");
        c.expect(rs.skipped_over_ceiling > 0, tag + " skipped-d ledger is populated");
        c.expect(rs.processed + rs.skipped_over_ceiling + rs.skipped_filtered +
                         rs.skipped_unsolvable == rs.enumerated,
                 tag + " ledger covers the enumeration");
        c.expect(rs.records.size() <= it.paper_count,
                 tag + " emitted count within the full-run count");
        bool all_verify = true;
        for (const auto& r : rs.records) {
            mpz_class fx = case_value(it.pc, r.x);
            if (!trial_factor_smooth(fx, it.B)) all_verify = false;
            if (fx != r.d * r.y * r.y) all_verify = false;
        }
        c.expect(all_verify, tag + " every emitted solution passes trial division");
        c.log << "    " << tag << ": " << rs.records.size() << " of " << it.paper_count
              << " solutions below ceiling " << it.ceiling << " (skipped "
              << rs.skipped_over_ceiling << ")\n";
    }
    return c.ok;
}

// ---------------------------------------------------------------- criterion 8
bool crit8(CheckCtx& c) {
    SearchConfig base = make_config(PolyCase::x2m1, 42, 1);
    ResultSet one = run(base);
    std::ostringstream s1;
    write_csv(one, s1);

    SearchConfig par = make_config(PolyCase::x2m1, 42, g_workers);
    ResultSet many = run(par);
    std::ostringstream s2;
    write_csv(many, s2);
    c.expect(s1.str() == s2.str(), "1-worker and N-worker runs are byte-identical");

    std::string ckpt = "/tmp/pellsmooth_acc_ckpt";
    std::remove(ckpt.c_str());
    SearchConfig halt = make_config(PolyCase::x2m1, 42, g_workers);
    halt.checkpoint_path = ckpt;
    halt.checkpoint_interval = 512;
    halt.halt_after = 4000;
    ResultSet h = run(halt);
    c.expect(h.halted, "halted mid-run at the checkpoint boundary");

    SearchConfig resume = make_config(PolyCase::x2m1, 42, g_workers);
    resume.checkpoint_path = ckpt;
    ResultSet r = run(resume);
    std::ostringstream s3;
    write_csv(r, s3);
    c.expect(s1.str() == s3.str(), "kill-and-resume run is byte-identical");
    std::remove(ckpt.c_str());
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
        if (!std::strcmp(argv[i], "--workers") && i + 1 < argc)
            g_workers = static_cast<unsigned>(std::atoi(argv[++i]));
    }

    struct Crit {
        int id;
        const char* name;
        bool (*fn)(CheckCtx&);
    };
    const Crit crits[] = {
        {1, "Lehmer reproduction: x2-1 bound 42 over 8191 radicands -> 869 odd solutions", crit1},
        {2, "Luca reproduction: x2+1 bound 100 over 4095 radicands -> 156 solutions", crit2},
        {3, "single-radicand checks (d=5, d=3, d=2 families)", crit3},
        {4, "spot verification of the extreme solutions + pipeline containment", crit4},
        {5, "oracle equivalence for every case at bounds 10/42/50 up to x = 1e7", crit5},
        {6, "property suites (totality, Perron, Yokoi, round-trip, sequences, divisors)", crit6},
        {7, "bound-200 runs complete under a ceiling with a skipped-d ledger", crit7},
        {8, "determinism and kill/resume reproduce byte-identical output", crit8},
    };

    int failures = 0;
    for (const auto& cr : crits) {
        if (only && cr.id != only) continue;
        CheckCtx ctx;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = cr.fn(ctx);
        } catch (const std::exception& e) {
            ctx.log << "    exception: " << e.what() << "\n";
            ok = false;
        }
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        std::printf("criterion %d: %s  [%s, %llds]\n", cr.id, ok ? "PASS" : "FAIL", cr.name,
                    static_cast<long long>(secs));
        std::fputs(ctx.log.str().c_str(), stdout);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures;
}
