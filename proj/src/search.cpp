#include "pellsmooth/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pellsmooth/cf.hpp"
#include "pellsmooth/compactrep.hpp"
#include "pellsmooth/primes.hpp"
#include "pellsmooth/regulator.hpp"
#include "pellsmooth/sequences.hpp"
#include "pellsmooth/smoothness.hpp"
#include "pellsmooth/util.hpp"

#include "json.hpp"

namespace pellsmooth {

void SearchConfig::finalize() {
    if (bound < 3) throw usage_error("bound must be >= 3");
    primes = allowed_primes(pcase, bound);
    if (primes.empty()) throw usage_error("no admissible primes below the bound");
    if (primes.size() > 40) throw usage_error("prime set too large to enumerate");
    if (workers == 0) workers = 1;
    if (checkpoint_interval == 0) checkpoint_interval = 1024;
}

std::string SolutionRecord::csv_line() const {
    std::ostringstream os;
    os << case_label(pcase) << ',' << d.get_str() << ',' << N << ',' << k << ',' << x.get_str()
       << ',' << y.get_str() << ',';
    bool first = true;
    if (fx_factorization.empty()) os << 1;
    for (const auto& [p, e] : fx_factorization) {
        if (!first) os << '*';
        os << p << '^' << e;
        first = false;
    }
    os << ',' << (verified ? 1 : 0);
    return os.str();
}

mpz_class subset_product(const std::vector<std::uint32_t>& primes, std::uint64_t gray_index) {
    mpz_class d = 1;
    std::uint64_t bits = gray_index ^ (gray_index >> 1);
    for (std::size_t j = 0; j < primes.size(); ++j)
        if (bits & (1ULL << j)) d *= primes[j];
    return d;
}

void enumerate_d(const SearchConfig& cfg,
                 const std::function<bool(std::uint64_t, const mpz_class&)>& emit) {
    const std::uint64_t total = (1ULL << cfg.primes.size()) - 1;
    mpz_class d = 1;
    std::uint64_t bits = 0;
    for (std::uint64_t i = 1; i <= total; ++i) {
        std::uint64_t g = i ^ (i >> 1);
        std::uint64_t flip = g ^ bits;
        PS_CHECK(flip && !(flip & (flip - 1)), "enumerate_d: gray step flips one bit");
        unsigned b = static_cast<unsigned>(__builtin_ctzll(flip));
        if (g & flip)
            d *= cfg.primes[b];
        else
            mpz_divexact_ui(d.get_mpz_t(), d.get_mpz_t(), cfg.primes[b]);
        bits = g;
        if (!emit(i, d)) return;
    }
}

namespace {

std::map<std::uint64_t, unsigned> factor_over_primes(const mpz_class& n,
                                                     const std::vector<std::uint32_t>& primes) {
    std::map<std::uint64_t, unsigned> fac;
    mpz_class m = n;
    for (std::uint32_t p : primes) {
        unsigned e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            ++e;
        }
        if (e) fac[p] = e;
    }
    PS_CHECK(m == 1, "factor_over_primes: value not smooth over the configured primes");
    return fac;
}

// Divisibility index used for pruning: Y(pi) | Y(pi') whenever pi | pi'.
unsigned long prune_index(const EquationFamily& f, unsigned long member) {
    if (f.d2_special) return 0;  // no pruning for the d = 2 special families
    switch (f.pcase) {
        case PolyCase::x2m1:
            return member;
        case PolyCase::x2p1:
            return 2 * member - 1;
        case PolyCase::x2p4odd:
        case PolyCase::x2m4odd:
            return f.eta_exponent(member);
        case PolyCase::x2p2:
        case PolyCase::x2m2:
            return 2 * f.eta_exponent(member) + 1;  // odd Lehmer index
        default:
            break;
    }
    return 0;
}

}  // namespace

std::vector<SolutionRecord> process_d(const SearchConfig& cfg, const mpz_class& d,
                                      SkipReason* skip) {
    *skip = SkipReason::none;
    const PolyCase c = cfg.pcase;
    if (!d_admissible(c, d)) {
        *skip = SkipReason::filtered;
        return {};
    }
    const bool is_two_case = (c == PolyCase::x2p2 || c == PolyCase::x2m2);
    if (is_two_case && d != 2) {
        std::vector<std::uint32_t> dp;
        mpz_class m = d;
        for (std::uint32_t p : cfg.primes)
            if (mpz_divisible_ui_p(m.get_mpz_t(), p)) dp.push_back(p);
        if (!yokoi_residue_filter(c, dp)) {
            *skip = SkipReason::filtered;
            return {};
        }
    }
    if (d > cfg.d_ceiling) {
        *skip = SkipReason::over_ceiling;
        return {};
    }

    EquationFamily fam;
    CompactRep rep_eta, rep_nu;
    bool have_eta = false, have_nu = false;
    double reg_value = 0.0;

    if (is_two_case && d == 2) {
        auto f = classify_two_family(c, d, pell_norm(c));
        PS_CHECK(f.has_value(), "process_d: d = 2 family must exist");
        fam = *f;
        reg_value = std::log(1.0 + std::sqrt(2.0));
    } else {
        FieldCtx ctx(d);
        RegulatorOptions ropts;
        ropts.d_ceiling = cfg.d_ceiling;
        Regulator reg = regulator(ctx, 0, ropts);
        reg_value = reg.dvalue;
        rep_eta = build_compact(ctx, reg);
        have_eta = true;

        if (!is_two_case) {
            int n = unit_power_index(d, eval_mod(rep_eta, 16));
            if (reg.period_known) {
                // cross-check: the negative Pell equation is solvable exactly
                // when the period is odd, i.e. when n is 2 or 6
                bool neg = (reg.cf_period % 2 == 1);
                PS_CHECK(neg == (n == 2 || n == 6),
                         "process_d: unit classification contradicts the period parity");
            }
            auto f = classify_unit_family(c, d, n);
            if (!f) {
                *skip = SkipReason::unsolvable;
                return {};
            }
            fam = *f;
        } else {
            bool plus = yokoi_unit_criterion(PolyCase::x2m2, d, rep_eta);
            bool minus = yokoi_unit_criterion(PolyCase::x2p2, d, rep_eta);
            if (plus && minus)
                throw math_error("process_d: both +-2 equations solvable for d = " + d.get_str());
            int sign = plus ? +2 : (minus ? -2 : 0);
            if (sign != 0) {
                int n = unit_power_index(d, eval_mod(rep_eta, 16));
                PS_CHECK(n == 1, "process_d: +-2 solvable but the unit has norm -1");
            }
            auto f = classify_two_family(c, d, sign);
            if (!f) {
                *skip = SkipReason::unsolvable;
                return {};
            }
            fam = *f;
            rep_nu = build_compact_nu(ctx, reg);
            have_nu = true;
        }
    }

    FamilySource src;
    src.fam = &fam;
    src.rep_eta = have_eta ? &rep_eta : nullptr;
    src.rep_nu = have_nu ? &rep_nu : nullptr;

    const unsigned long members = fam.member_count(cfg.bound);
    std::vector<SolutionRecord> out;
    std::vector<unsigned long> nonsmooth;

    auto d_fac = factor_over_primes(d, cfg.primes);

    // members, with first-nonsmooth divisibility pruning
    mpz_class z1 = 1, y1_exact = -1;
    bool first = true;
    for (unsigned long m = 1; m <= members; ++m) {
        unsigned long pi = prune_index(fam, m);
        bool pruned = false;
        if (pi > 0)
            for (unsigned long p0 : nonsmooth)
                if (p0 != 0 && pi % p0 == 0) {
                    pruned = true;
                    break;
                }
        if (pruned && !first) continue;

        double size_log = member_y_size_log(fam, reg_value, m);
        SmoothVerdict v = pruned ? SmoothVerdict{} : smooth_test(src, m, cfg.primes, size_log);
        if (first) {
            z1 = v.smooth ? factorization_value(v.factorization)
                          : smooth_part(src, m, cfg.primes, size_log);
            if (v.smooth) y1_exact = z1;
            bool ok = grh_free_check(d, z1, fam.N, y1_exact);
            if (!ok)
                throw math_error(
                    "process_d: convergent check found a smaller solution for d = " + d.get_str() +
                    " -- the computed unit is not fundamental");
            first = false;
            if (!v.smooth) break;  // Y_1 divides every later Y
        }
        if (!v.smooth) {
            if (pi > 0) nonsmooth.push_back(pi);
            continue;
        }

        mpz_class y = factorization_value(v.factorization);
        mpz_class x = reconstruct_x(d, y, fam.N);
        PS_CHECK(x >= 1, "process_d: nonpositive solution");

        SolutionRecord rec;
        rec.pcase = c;
        rec.d = d;
        rec.N = fam.N;
        rec.k = fam.record_index(m);
        rec.x = x;
        rec.y = y;
        rec.fx_factorization = d_fac;
        for (const auto& [p, e] : v.factorization) rec.fx_factorization[p] += 2 * e;
        rec.verified = true;
        out.push_back(std::move(rec));
    }
    return out;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    h ^= '\n';
    h *= 1099511628211ULL;
    return h;
}

struct RunState {
    std::vector<SolutionRecord> records;  // emission order
    std::uint64_t committed = 0;
    std::size_t over_ceiling = 0, filtered = 0, unsolvable = 0, processed = 0;
    std::uint64_t digest = 1469598103934665603ULL;  // FNV offset basis
};

std::string checkpoint_text(const SearchConfig& cfg, const RunState& st) {
    std::ostringstream os;
    os << "PSCKPT 1\n";
    os << "case " << case_label(cfg.pcase) << '\n';
    os << "bound " << cfg.bound << '\n';
    os << "ceiling " << cfg.d_ceiling.get_str() << '\n';
    os << "nprimes " << cfg.primes.size() << '\n';
    os << "committed " << st.committed << '\n';
    os << "over_ceiling " << st.over_ceiling << '\n';
    os << "filtered " << st.filtered << '\n';
    os << "unsolvable " << st.unsolvable << '\n';
    os << "processed " << st.processed << '\n';
    os << "digest " << st.digest << '\n';
    os << "records " << st.records.size() << '\n';
    for (const auto& r : st.records) os << r.csv_line() << '\n';
    os << "END\n";
    return os.str();
}

void write_checkpoint(const SearchConfig& cfg, const RunState& st) {
    if (cfg.checkpoint_path.empty()) return;
    std::string tmp = cfg.checkpoint_path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) throw usage_error("cannot write checkpoint file " + tmp);
        f << checkpoint_text(cfg, st);
    }
    if (std::rename(tmp.c_str(), cfg.checkpoint_path.c_str()) != 0)
        throw usage_error("cannot move checkpoint into place at " + cfg.checkpoint_path);
}

bool load_checkpoint(const SearchConfig& cfg, RunState& st) {
    if (cfg.checkpoint_path.empty()) return false;
    std::ifstream f(cfg.checkpoint_path);
    if (!f) return false;
    auto fail = [&](const std::string& why) -> bool {
        throw usage_error("refusing to resume from checkpoint " + cfg.checkpoint_path + ": " + why);
    };
    std::string tag, val;
    std::uint64_t version = 0;
    if (!(f >> tag >> version) || tag != "PSCKPT" || version != 1) return fail("bad header");
    auto expect = [&](const std::string& key) -> std::string {
        std::string k, v;
        if (!(f >> k >> v) || k != key) fail("missing field " + key);
        return v;
    };
    if (expect("case") != case_label(cfg.pcase)) fail("case mismatch");
    if (expect("bound") != std::to_string(cfg.bound)) fail("bound mismatch");
    if (expect("ceiling") != cfg.d_ceiling.get_str()) fail("ceiling mismatch");
    if (expect("nprimes") != std::to_string(cfg.primes.size())) fail("prime set mismatch");
    st.committed = std::stoull(expect("committed"));
    st.over_ceiling = std::stoull(expect("over_ceiling"));
    st.filtered = std::stoull(expect("filtered"));
    st.unsolvable = std::stoull(expect("unsolvable"));
    st.processed = std::stoull(expect("processed"));
    std::uint64_t digest = std::stoull(expect("digest"));
    std::size_t nrec = std::stoull(expect("records"));
    std::string line;
    std::getline(f, line);  // eat newline
    st.records.clear();
    st.digest = 1469598103934665603ULL;
    for (std::size_t i = 0; i < nrec; ++i) {
        if (!std::getline(f, line)) fail("truncated record list");
        std::istringstream ls(line);
        auto recs = read_csv(ls);
        if (recs.size() != 1) fail("bad record line");
        st.digest = fnv1a(st.digest, line);
        st.records.push_back(std::move(recs[0]));
    }
    if (!std::getline(f, line) || line != "END") fail("missing END marker (truncated checkpoint)");
    if (digest != st.digest) fail("record digest mismatch");
    return true;
}

}  // namespace

ResultSet run(const SearchConfig& cfg_in) {
    SearchConfig cfg = cfg_in;
    cfg.finalize();
    const std::uint64_t total = (1ULL << cfg.primes.size()) - 1;

    RunState st;
    load_checkpoint(cfg, st);

    ResultSet rs;
    rs.config = cfg;
    rs.enumerated = total;

    struct Outcome {
        SkipReason skip = SkipReason::none;
        std::vector<SolutionRecord> recs;
    };

    const std::uint64_t chunk_size = 64;
    const std::uint64_t resume_at = st.committed;
    std::atomic<std::uint64_t> next_chunk{resume_at / chunk_size};
    std::mutex mu;
    std::map<std::uint64_t, std::vector<Outcome>> done;  // chunk -> outcomes
    std::exception_ptr first_error;
    std::atomic<bool> stop{false};
    const std::uint64_t halt_at = cfg.halt_after;  // absolute committed-subset count
    std::uint64_t last_checkpoint = st.committed;

    auto worker = [&]() {
        try {
            for (;;) {
                if (stop.load()) return;
                std::uint64_t chunk = next_chunk.fetch_add(1);
                std::uint64_t lo = chunk * chunk_size + 1;
                if (lo > total) return;
                std::uint64_t hi = std::min(total, lo + chunk_size - 1);
                std::vector<Outcome> outs;
                outs.reserve(hi - lo + 1);
                for (std::uint64_t i = lo; i <= hi; ++i) {
                    if (i <= resume_at) {
                        outs.emplace_back();  // placeholder, already committed
                        continue;
                    }
                    mpz_class d = subset_product(cfg.primes, i);
                    Outcome o;
                    o.recs = process_d(cfg, d, &o.skip);
                    outs.push_back(std::move(o));
                }
                std::lock_guard<std::mutex> lk(mu);
                done.emplace(chunk, std::move(outs));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(mu);
            if (!first_error) first_error = std::current_exception();
            stop.store(true);
        }
    };

    std::vector<std::thread> threads;
    for (unsigned w = 0; w < cfg.workers; ++w) threads.emplace_back(worker);

    // Committer: advance the prefix in order, checkpointing as configured.
    bool halted = false;
    {
        std::uint64_t next_commit_chunk = st.committed / chunk_size;
        for (;;) {
            bool progressed = false;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (first_error) break;
                auto it = done.find(next_commit_chunk);
                if (it != done.end()) {
                    std::uint64_t lo = next_commit_chunk * chunk_size + 1;
                    for (std::size_t idx = 0; idx < it->second.size(); ++idx) {
                        std::uint64_t i = lo + idx;
                        if (i <= resume_at) continue;
                        Outcome& o = it->second[idx];
                        switch (o.skip) {
                            case SkipReason::none: st.processed++; break;
                            case SkipReason::over_ceiling: st.over_ceiling++; break;
                            case SkipReason::filtered: st.filtered++; break;
                            case SkipReason::unsolvable: st.unsolvable++; break;
                        }
                        for (auto& r : o.recs) {
                            st.digest = fnv1a(st.digest, r.csv_line());
                            st.records.push_back(std::move(r));
                        }
                        st.committed = i;
                        if (halt_at && st.committed >= halt_at) {
                            halted = true;
                            break;
                        }
                    }
                    done.erase(it);
                    ++next_commit_chunk;
                    progressed = true;
                }
            }
            if (halted) break;
            if (st.committed >= total) break;
            if (progressed) {
                if (st.committed - last_checkpoint >= cfg.checkpoint_interval) {
                    write_checkpoint(cfg, st);
                    last_checkpoint = st.committed;
                }
            } else {
                std::this_thread::sleep_for(std::chrono::milliseconds(1));
            }
        }
    }
    stop.store(true);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);

    write_checkpoint(cfg, st);

    rs.halted = halted;
    rs.processed = st.processed;
    rs.skipped_over_ceiling = st.over_ceiling;
    rs.skipped_filtered = st.filtered;
    rs.skipped_unsolvable = st.unsolvable;
    if (!halted)
        PS_CHECK(st.processed + st.over_ceiling + st.filtered + st.unsolvable == total,
                 "run: ledger does not cover the enumerated subsets");
    rs.records = std::move(st.records);
    std::sort(rs.records.begin(), rs.records.end(), [](const SolutionRecord& a, const SolutionRecord& b) {
        if (a.d != b.d) return a.d < b.d;
        return a.k < b.k;
    });
    return rs;
}

void write_csv(const ResultSet& rs, std::ostream& os) {
    os << "case,d,N,k,x,y,factorization,verified\n";
    for (const auto& r : rs.records) os << r.csv_line() << '\n';
}

void write_json(const ResultSet& rs, std::ostream& os) {
    nlohmann::json j;
    j["case"] = case_label(rs.config.pcase);
    j["bound"] = rs.config.bound;
    j["enumerated"] = rs.enumerated;
    j["processed"] = rs.processed;
    j["skipped"] = {{"over_ceiling", rs.skipped_over_ceiling},
                    {"filtered", rs.skipped_filtered},
                    {"unsolvable", rs.skipped_unsolvable}};
    j["halted"] = rs.halted;
    j["records"] = nlohmann::json::array();
    for (const auto& r : rs.records) {
        nlohmann::json rec;
        rec["case"] = case_label(r.pcase);
        rec["d"] = r.d.get_str();
        rec["N"] = r.N;
        rec["k"] = r.k;
        rec["x"] = r.x.get_str();
        rec["y"] = r.y.get_str();
        std::ostringstream fs;
        bool first = true;
        for (const auto& [p, e] : r.fx_factorization) {
            if (!first) fs << '*';
            fs << p << '^' << e;
            first = false;
        }
        rec["factorization"] = fs.str();
        rec["verified"] = r.verified;
        j["records"].push_back(std::move(rec));
    }
    os << j.dump(2) << '\n';
}

std::vector<SolutionRecord> read_csv(std::istream& is) {
    std::vector<SolutionRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line.rfind("case,", 0) == 0) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 8) throw usage_error("malformed CSV record: " + line);
        SolutionRecord r;
        auto c = parse_case_label(f[0]);
        if (!c) throw usage_error("unknown case in CSV: " + f[0]);
        r.pcase = *c;
        r.d = mpz_class(f[1]);
        r.N = std::stoi(f[2]);
        r.k = std::stol(f[3]);
        r.x = mpz_class(f[4]);
        r.y = mpz_class(f[5]);
        if (f[6] != "1") {
            std::istringstream facs(f[6]);
            std::string part;
            while (std::getline(facs, part, '*')) {
                auto caret = part.find('^');
                if (caret == std::string::npos) throw usage_error("bad factor " + part);
                r.fx_factorization[std::stoull(part.substr(0, caret))] =
                    static_cast<unsigned>(std::stoul(part.substr(caret + 1)));
            }
        }
        r.verified = (f[7] == "1" || f[7] == "true");
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

// Largest r >= 2 with x = t^r, plus the root.
std::pair<int, mpz_class> perfect_power(const mpz_class& x) {
    if (x <= 1) return {1, x};
    if (!mpz_perfect_power_p(x.get_mpz_t())) return {1, x};
    for (int r = static_cast<int>(mpz_sizeinbase(x.get_mpz_t(), 2)); r >= 2; --r) {
        mpz_class root;
        if (mpz_root(root.get_mpz_t(), x.get_mpz_t(), r) != 0) return {r, root};
    }
    return {1, x};
}

}  // namespace

Report summarize_records(const std::vector<SolutionRecord>& records, const std::string& case_name,
                         std::uint32_t bound) {
    Report rep;
    rep.case_name = case_name;
    rep.bound = bound;
    rep.total = records.size();

    std::vector<mpz_class> xs;
    xs.reserve(records.size());
    std::map<mpz_class, std::size_t> per_d;
    for (const auto& r : records) {
        xs.push_back(r.x);
        if (mpz_odd_p(r.x.get_mpz_t()))
            rep.odd++;
        else
            rep.even++;
        per_d[r.d]++;
        if (r.k > rep.max_index) {
            rep.max_index = r.k;
            rep.max_index_d = r.d;
        }
    }
    std::sort(xs.rbegin(), xs.rend());
    for (std::size_t i = 0; i < xs.size() && i < 3; ++i) rep.top.push_back(xs[i]);

    std::map<int, mpz_class> best_root;
    for (const auto& x : xs) {
        auto [r, root] = perfect_power(x);
        for (int rr = 2; rr <= r; ++rr) {
            if (r % rr != 0) continue;
            mpz_class root_rr;
            mpz_root(root_rr.get_mpz_t(), x.get_mpz_t(), rr);
            auto it = best_root.find(rr);
            if (it == best_root.end() || root_rr > it->second) best_root[rr] = root_rr;
        }
        if (r > rep.max_power) {
            rep.max_power = r;
            rep.max_power_root = root;
        }
    }
    for (const auto& [r, root] : best_root) rep.powers.emplace_back(r, root);

    for (const auto& [d, n] : per_d) {
        if (n > rep.champion_count) {
            rep.champion_count = n;
            rep.champion_d = d;
        }
    }
    return rep;
}

Report summarize(const ResultSet& rs) {
    Report rep = summarize_records(rs.records, case_label(rs.config.pcase), rs.config.bound);
    rep.skipped_over_ceiling = rs.skipped_over_ceiling;
    rep.skipped_filtered = rs.skipped_filtered;
    rep.skipped_unsolvable = rs.skipped_unsolvable;
    rep.enumerated = rs.enumerated;
    rep.processed = rs.processed;
    rep.complete = rs.complete();
    return rep;
}

std::string render_report(const Report& r, const std::string& format) {
    if (format == "json") {
        nlohmann::json j;
        j["case"] = r.case_name;
        j["bound"] = r.bound;
        j["total"] = r.total;
        j["odd"] = r.odd;
        j["even"] = r.even;
        j["top"] = nlohmann::json::array();
        for (const auto& x : r.top) j["top"].push_back(x.get_str());
        j["powers"] = nlohmann::json::array();
        for (const auto& [e, root] : r.powers)
            j["powers"].push_back({{"r", e}, {"largest_root", root.get_str()}});
        j["max_power"] = r.max_power;
        j["max_power_root"] = r.max_power_root.get_str();
        j["champion_d"] = r.champion_d.get_str();
        j["champion_count"] = r.champion_count;
        j["max_index_d"] = r.max_index_d.get_str();
        j["max_index"] = r.max_index;
        j["skipped"] = {{"over_ceiling", r.skipped_over_ceiling},
                        {"filtered", r.skipped_filtered},
                        {"unsolvable", r.skipped_unsolvable}};
        j["enumerated"] = r.enumerated;
        j["processed"] = r.processed;
        j["complete"] = r.complete;
        return j.dump(2);
    }
    if (format == "csv") {
        std::ostringstream os;
        os << "key,value\n";
        os << "case," << r.case_name << "\nbound," << r.bound << "\ntotal," << r.total << "\nodd,"
           << r.odd << "\neven," << r.even << '\n';
        for (std::size_t i = 0; i < r.top.size(); ++i)
            os << "top" << (i + 1) << ',' << r.top[i].get_str() << '\n';
        for (const auto& [e, root] : r.powers)
            os << "largest_root_r" << e << ',' << root.get_str() << '\n';
        os << "max_power," << r.max_power << "\nchampion_d," << r.champion_d.get_str()
           << "\nchampion_count," << r.champion_count << '\n';
        return os.str();
    }
    std::ostringstream os;
    os << "case " << r.case_name << ", bound " << r.bound << "\n";
    os << "  " << r.total << " solutions, " << r.odd << " odd, " << r.even << " even\n";
    if (!r.top.empty()) {
        os << "  largest:";
        for (const auto& x : r.top) os << ' ' << x.get_str();
        os << '\n';
    }
    for (const auto& [e, root] : r.powers)
        os << "  largest x = t^" << e << ": t = " << root.get_str() << '\n';
    if (r.max_power >= 2)
        os << "  highest power among solutions: exponent " << r.max_power << " at t = "
           << r.max_power_root.get_str() << '\n';
    if (r.champion_count)
        os << "  most solutions from d = " << r.champion_d.get_str() << " (" << r.champion_count
           << ")\n";
    if (r.max_index)
        os << "  largest power index " << r.max_index << " at d = " << r.max_index_d.get_str()
           << '\n';
    os << "  subsets: " << r.enumerated << " enumerated, " << r.processed << " processed, "
       << r.skipped_over_ceiling << " over ceiling, " << r.skipped_filtered << " filtered, "
       << r.skipped_unsolvable << " unsolvable\n";
    os << "  complete: " << (r.complete ? "yes" : "no (skipped-d ledger applies)") << '\n';
    return os.str();
}

OracleReport cross_validate_records(const std::vector<SolutionRecord>& records, PolyCase c,
                                    std::uint32_t bound, std::uint64_t x_limit, unsigned workers) {
    OracleReport rep;
    rep.case_name = case_label(c);
    rep.bound = bound;
    rep.x_limit = x_limit;

    auto oracle = brute_force(c, bound, x_limit, workers);
    rep.oracle_count = oracle.size();

    std::vector<mpz_class> got;
    mpz_class lim(static_cast<unsigned long>(x_limit));
    for (const auto& r : records)
        if (r.x <= lim) got.push_back(r.x);
    std::sort(got.begin(), got.end());
    rep.results_count = got.size();

    std::size_t i = 0, j = 0;
    while (i < oracle.size() || j < got.size()) {
        mpz_class ox = i < oracle.size() ? mpz_class(static_cast<unsigned long>(oracle[i]))
                                         : mpz_class(0);
        if (j >= got.size() || (i < oracle.size() && ox < got[j])) {
            rep.missing_in_results.push_back(ox);
            ++i;
        } else if (i >= oracle.size() || got[j] < ox) {
            rep.extra_in_results.push_back(got[j]);
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    return rep;
}

OracleReport cross_validate(const ResultSet& rs, std::uint64_t x_limit, unsigned workers) {
    return cross_validate_records(rs.records, rs.config.pcase, rs.config.bound, x_limit, workers);
}

}  // namespace pellsmooth
