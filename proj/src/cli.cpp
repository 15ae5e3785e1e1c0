#include "pellsmooth/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "pellsmooth/cf.hpp"
#include "pellsmooth/compactrep.hpp"
#include "pellsmooth/primes.hpp"
#include "pellsmooth/regulator.hpp"
#include "pellsmooth/search.hpp"
#include "pellsmooth/smoothness.hpp"
#include "pellsmooth/util.hpp"

namespace pellsmooth {

namespace {

// CLI case names, including the composed even+odd forms.
struct CaseSpec {
    bool composed = false;
    PolyCase core;               // the odd branch for composed cases
    PolyCase even_sub;           // the x^2 +- 1 run doubling into the even branch
    PolyCase label = PolyCase::x2p1;  // case written on emitted records
};

CaseSpec parse_cli_case(const std::string& s) {
    CaseSpec cs;
    if (s == "x2+4") {
        cs.composed = true;
        cs.core = PolyCase::x2p4odd;
        cs.even_sub = PolyCase::x2p1;
        cs.label = PolyCase::x2p4;
        return cs;
    }
    if (s == "x2-4") {
        cs.composed = true;
        cs.core = PolyCase::x2m4odd;
        cs.even_sub = PolyCase::x2m1;
        cs.label = PolyCase::x2m4;
        return cs;
    }
    auto c = parse_case_label(s);
    if (!c)
        throw usage_error("unknown case '" + s +
                          "' (expected x2+1, x2-1, x2+2, x2-2, x2+4odd, x2-4odd, x2+4, x2-4)");
    if (composed_case(*c))
        throw usage_error("internal: composed labels resolve through their string names");
    cs.core = *c;
    cs.label = *c;
    return cs;
}

std::string default_checkpoint_dir() {
    const char* env = std::getenv("PELLSMOOTH_CHECKPOINT_DIR");
    return env ? std::string(env) : std::string();
}

// Records of the even branch of a composed case: x = 2x', y = 2y' from the
// x^2 +- 1 record (x'^2 +- 1 = d y'^2 doubles into (2x')^2 +- 4 = d (2y')^2).
std::vector<SolutionRecord> doubled_records(const std::vector<SolutionRecord>& base,
                                            PolyCase composed_label) {
    std::vector<SolutionRecord> out;
    out.reserve(base.size());
    for (const auto& r : base) {
        SolutionRecord s = r;
        s.pcase = composed_label;
        s.x = 2 * r.x;
        s.y = 2 * r.y;
        s.fx_factorization[2] += 2;
        out.push_back(std::move(s));
    }
    return out;
}

int run_command(const std::string& case_name, unsigned bound, const std::string& out_path,
                const std::string& json_path, const std::string& ceiling_str, unsigned workers,
                std::string checkpoint, std::size_t interval, std::size_t halt_after,
                bool print_report, const std::string& format) {
    CaseSpec cs = parse_cli_case(case_name);

    auto make_cfg = [&](PolyCase c, const std::string& ckpt_suffix) {
        SearchConfig cfg;
        cfg.pcase = c;
        cfg.bound = bound;
        if (!ceiling_str.empty()) cfg.d_ceiling = mpz_class(ceiling_str);
        cfg.workers = workers;
        cfg.checkpoint_interval = interval;
        cfg.halt_after = halt_after;
        if (!checkpoint.empty())
            cfg.checkpoint_path = checkpoint + ckpt_suffix;
        else if (!default_checkpoint_dir().empty())
            cfg.checkpoint_path = default_checkpoint_dir() + "/" + case_label(c) + "-" +
                                  std::to_string(bound) + ".ckpt";
        cfg.finalize();
        return cfg;
    };

    ResultSet rs = run(make_cfg(cs.core, cs.composed ? ".odd" : ""));
    std::vector<SolutionRecord> records = rs.records;
    if (cs.composed) {
        for (auto& r : records) r.pcase = cs.label;
        ResultSet even = run(make_cfg(cs.even_sub, ".even"));
        auto doubled = doubled_records(even.records, cs.label);
        records.insert(records.end(), doubled.begin(), doubled.end());
        std::sort(records.begin(), records.end(),
                  [](const SolutionRecord& a, const SolutionRecord& b) {
                      if (a.d != b.d) return a.d < b.d;
                      if (a.k != b.k) return a.k < b.k;
                      return a.x < b.x;
                  });
        rs.records = records;
        rs.skipped_over_ceiling += even.skipped_over_ceiling;
        rs.skipped_filtered += even.skipped_filtered;
        rs.skipped_unsolvable += even.skipped_unsolvable;
        rs.processed += even.processed;
        rs.enumerated += even.enumerated;
        rs.halted = rs.halted || even.halted;
    }

    if (rs.halted) {
        std::cout << "halted after " << rs.config.halt_after
                  << " committed subsets; checkpoint written\n";
        return 0;
    }

    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw usage_error("cannot open output file " + out_path);
        write_csv(rs, f);
    }
    if (!json_path.empty()) {
        std::ofstream f(json_path, std::ios::trunc);
        if (!f) throw usage_error("cannot open output file " + json_path);
        write_json(rs, f);
    }
    if (out_path.empty() && json_path.empty()) write_csv(rs, std::cout);

    if (print_report) {
        Report rep = summarize_records(records, case_name, bound);
        rep.enumerated = rs.enumerated;
        rep.processed = rs.processed;
        rep.skipped_over_ceiling = rs.skipped_over_ceiling;
        rep.skipped_filtered = rs.skipped_filtered;
        rep.skipped_unsolvable = rs.skipped_unsolvable;
        rep.complete = rs.complete();
        std::cout << render_report(rep, format);
    }
    return 0;
}

int verify_command(const std::string& case_name, const std::string& x_str, unsigned bound,
                   bool pipeline, const std::string& ceiling_str) {
    CaseSpec cs = parse_cli_case(case_name);
    mpz_class x(x_str);
    if (x < 1) throw usage_error("--x must be a positive integer");

    PolyCase c = cs.core;
    if (cs.composed) {
        // route even x through the doubled x^2 +- 1 form, odd x through the
        // odd branch
        if (mpz_even_p(x.get_mpz_t())) {
            c = cs.even_sub;
            x /= 2;
        }
    } else if (odd_x_only(c) && mpz_even_p(x.get_mpz_t())) {
        throw usage_error("case " + case_name + " scans odd x only");
    }

    mpz_class fx = case_value(c, x);
    if (fx < 1) throw usage_error("f(x) is not positive for x = " + x.get_str());
    auto fac = trial_factor_smooth(fx, bound);
    std::cout << case_label(c) << " at x = " << x.get_str() << ": f(x) = " << fx.get_str() << "\n";
    if (!fac) {
        std::cout << "NOT " << bound << "-smooth\n";
        return 1;
    }
    std::cout << "factorization:";
    for (const auto& [p, e] : *fac) std::cout << ' ' << p << '^' << e;
    std::cout << "\n" << bound << "-smooth: yes\n";

    if (!pipeline) return 0;

    // Squarefree part gives the radicand; rerun the pipeline on it and check
    // that x is found.
    std::map<mpz_class, unsigned> fz;
    for (const auto& [p, e] : *fac) fz[mpz_class(static_cast<unsigned long>(p))] = e;
    mpz_class d = squarefree_part(fz);
    PS_CHECK(d >= 2, "verify: trivial radicand");
    mpz_class y2 = fx / d;
    mpz_class y;
    mpz_sqrt(y.get_mpz_t(), y2.get_mpz_t());
    PS_CHECK(y * y == y2, "verify: f(x)/d is not a square");

    SearchConfig cfg;
    cfg.pcase = c;
    cfg.bound = bound;
    if (!ceiling_str.empty()) cfg.d_ceiling = mpz_class(ceiling_str);
    cfg.finalize();
    SkipReason skip;
    auto recs = process_d(cfg, d, &skip);
    if (skip != SkipReason::none) {
        std::cout << "pipeline: d = " << d.get_str() << " skipped\n";
        return 1;
    }
    for (const auto& r : recs) {
        if (r.x == x) {
            std::cout << "pipeline: found x at d = " << d.get_str() << ", power index " << r.k
                      << "\n";
            return 0;
        }
    }
    std::cout << "pipeline: x NOT found at d = " << d.get_str() << "\n";
    return 1;
}

int oracle_command(const std::string& case_name, unsigned bound, std::uint64_t x_limit,
                   const std::string& results_path, unsigned workers, const std::string& format) {
    CaseSpec cs = parse_cli_case(case_name);
    if (cs.composed) throw usage_error("oracle cross-validation works on the six core cases");

    std::vector<SolutionRecord> records;
    if (!results_path.empty()) {
        std::ifstream f(results_path);
        if (!f) throw usage_error("cannot read results file " + results_path);
        records = read_csv(f);
    } else {
        SearchConfig cfg;
        cfg.pcase = cs.core;
        cfg.bound = bound;
        cfg.workers = workers;
        cfg.finalize();
        records = run(cfg).records;
    }
    OracleReport rep = cross_validate_records(records, cs.core, bound, x_limit, workers);
    std::cout << (format == "json" ? rep.json() : rep.text());
    return rep.clean() ? 0 : 1;
}

int report_command(const std::string& in_path, const std::string& format) {
    std::ifstream f(in_path);
    if (!f) throw usage_error("cannot read results file " + in_path);
    auto records = read_csv(f);
    std::string cname = records.empty() ? "(empty)" : case_label(records.front().pcase);
    Report rep = summarize_records(records, cname, 0);
    std::cout << render_report(rep, format);
    return 0;
}

int dump_compact_command(const std::string& d_str, bool nu, const std::string& out_path,
                         bool check) {
    mpz_class d(d_str);
    FieldCtx ctx(d);
    Regulator reg = regulator(ctx, 0, {});
    CompactRep rep = nu ? build_compact_nu(ctx, reg) : build_compact(ctx, reg);
    std::string text = serialize(rep);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw usage_error("cannot open output file " + out_path);
        f << text;
    }
    if (check) {
        CompactRep back = parse_compact(text);
        PS_CHECK(serialize(back) == text, "dump-compact: round-trip mismatch");
        QuadInt v = expand_exact(back, 100000);
        std::cerr << "expanded: " << v.str() << "\n";
    }
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"smooth values of quadratic polynomials via Pell equations"};
    app.require_subcommand(1);

    std::string case_name = "x2+1", out_path, json_path, ceiling_str, checkpoint, format = "text";
    unsigned bound = 100, workers = 1;
    std::size_t interval = 1024, halt_after = 0;
    bool report_flag = false;

    auto* runc = app.add_subcommand("run", "enumerate radicands and collect all solutions");
    runc->add_option("--case", case_name, "polynomial case")->required();
    runc->add_option("--bound", bound, "strict smoothness bound B")->required();
    runc->add_option("--out", out_path, "CSV output path");
    runc->add_option("--json-out", json_path, "JSON output path");
    runc->add_option("--d-ceiling", ceiling_str, "skip radicands above this value");
    runc->add_option("--workers", workers, "worker threads");
    runc->add_option("--checkpoint", checkpoint, "checkpoint file path");
    runc->add_option("--checkpoint-interval", interval, "subsets between checkpoints");
    runc->add_option("--halt-after", halt_after, "stop after committing N subsets (testing)");
    runc->add_flag("--report", report_flag, "print a summary report");
    runc->add_option("--format", format, "report format: text|json|csv");

    std::string x_str;
    bool no_pipeline = false;
    auto* ver = app.add_subcommand("verify", "check one x by trial division and the pipeline");
    ver->add_option("--case", case_name, "polynomial case")->required();
    ver->add_option("--x", x_str, "candidate solution")->required();
    ver->add_option("--bound", bound, "strict smoothness bound B")->required();
    ver->add_flag("--no-pipeline", no_pipeline, "skip the per-radicand pipeline check");
    ver->add_option("--d-ceiling", ceiling_str, "pipeline radicand ceiling");

    std::uint64_t x_limit = 1000000;
    std::string results_path;
    auto* orc = app.add_subcommand("oracle", "brute-force cross-validation");
    orc->add_option("--case", case_name, "polynomial case")->required();
    orc->add_option("--bound", bound, "strict smoothness bound B")->required();
    orc->add_option("--x-limit", x_limit, "verify up to this x");
    orc->add_option("--results", results_path, "CSV to cross-validate (default: run now)");
    orc->add_option("--workers", workers, "worker threads");
    orc->add_option("--format", format, "output format: text|json");

    std::string in_path;
    auto* repc = app.add_subcommand("report", "summarize a results CSV");
    repc->add_option("--in", in_path, "results CSV path")->required();
    repc->add_option("--format", format, "report format: text|json|csv");

    std::string d_str;
    bool nu = false, check = false;
    auto* dmp = app.add_subcommand("dump-compact", "print the compact representation for d");
    dmp->add_option("--d", d_str, "radicand")->required();
    dmp->add_flag("--nu", nu, "fundamental +-2 solution instead of the unit");
    dmp->add_option("--out", out_path, "output path");
    dmp->add_flag("--check", check, "round-trip and expand as a self-check");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::cout << app.help();
            return 0;
        }
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (runc->parsed())
            return run_command(case_name, bound, out_path, json_path, ceiling_str, workers,
                               checkpoint, interval, halt_after, report_flag, format);
        if (ver->parsed()) return verify_command(case_name, x_str, bound, !no_pipeline, ceiling_str);
        if (orc->parsed())
            return oracle_command(case_name, bound, x_limit, results_path, workers, format);
        if (repc->parsed()) return report_command(in_path, format);
        if (dmp->parsed()) return dump_compact_command(d_str, nu, out_path, check);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const limit_error& e) {
        std::cerr << "limit: " << e.what() << "\n";
        return 1;
    } catch (const math_error& e) {
        std::cerr << "consistency abort: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace pellsmooth
