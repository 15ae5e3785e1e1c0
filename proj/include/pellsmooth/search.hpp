#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pellsmooth/oracle.hpp"
#include "pellsmooth/pellsolve.hpp"

namespace pellsmooth {

struct SearchConfig {
    PolyCase pcase = PolyCase::x2p1;
    std::uint32_t bound = 100;
    mpz_class d_ceiling = mpz_class("1000000000000000000000");
    unsigned workers = 1;
    std::string checkpoint_path;
    std::size_t checkpoint_interval = 1024;
    std::size_t halt_after = 0;  // stop after committing this many subsets (0: run to the end)
    std::vector<std::uint32_t> primes;

    void finalize();  // fills `primes` and validates
};

struct SolutionRecord {
    PolyCase pcase;
    mpz_class d;
    int N = 0;
    long k = 0;
    mpz_class x;
    mpz_class y;
    std::map<std::uint64_t, unsigned> fx_factorization;  // of f(x) = d * y^2
    bool verified = false;

    std::string csv_line() const;
};

enum class SkipReason { none, over_ceiling, filtered, unsolvable };

struct ResultSet {
    SearchConfig config;
    std::vector<SolutionRecord> records;  // canonical (d, k) order
    std::size_t enumerated = 0;
    std::size_t processed = 0;
    std::size_t skipped_over_ceiling = 0;
    std::size_t skipped_filtered = 0;
    std::size_t skipped_unsolvable = 0;
    bool halted = false;
    bool grh_all_ok = true;

    bool complete() const { return skipped_over_ceiling == 0 && !halted; }
};

// Squarefree product for the gray-coded subset with the given index
// (1 <= idx < 2^primes.size()).
mpz_class subset_product(const std::vector<std::uint32_t>& primes, std::uint64_t gray_index);

// Enumerate all nonempty subsets in gray-code order (successive values share
// all but one prime). Callback gets (sequence number starting at 1, d);
// return false to stop.
void enumerate_d(const SearchConfig& cfg,
                 const std::function<bool(std::uint64_t, const mpz_class&)>& emit);

// The per-radicand pipeline: solvability, regulator, compact representation,
// smooth scan, reconstruction, unconditional convergent check. `skip` is set
// instead of returning records when the radicand is filtered/unsolvable/over
// the ceiling.
std::vector<SolutionRecord> process_d(const SearchConfig& cfg, const mpz_class& d,
                                      SkipReason* skip);

ResultSet run(const SearchConfig& cfg);

// CSV and JSON output; the CSV header is
// case,d,N,k,x,y,factorization,verified with factorization "p^e*p^e".
void write_csv(const ResultSet& rs, std::ostream& os);
void write_json(const ResultSet& rs, std::ostream& os);
std::vector<SolutionRecord> read_csv(std::istream& is);

struct Report {
    std::string case_name;
    std::uint32_t bound = 0;
    std::size_t total = 0, odd = 0, even = 0;
    std::vector<mpz_class> top;                        // largest three x
    std::vector<std::pair<int, mpz_class>> powers;     // (r, largest t with t^r a solution)
    int max_power = 1;
    mpz_class max_power_root;
    mpz_class champion_d;
    std::size_t champion_count = 0;
    mpz_class max_index_d;
    long max_index = 0;
    std::size_t skipped_over_ceiling = 0, skipped_filtered = 0, skipped_unsolvable = 0;
    std::size_t enumerated = 0, processed = 0;
    bool complete = true;
};

Report summarize(const ResultSet& rs);
Report summarize_records(const std::vector<SolutionRecord>& records, const std::string& case_name,
                         std::uint32_t bound);
std::string render_report(const Report& r, const std::string& format);  // text | json | csv

// Oracle comparison for x <= x_limit.
OracleReport cross_validate(const ResultSet& rs, std::uint64_t x_limit, unsigned workers = 1);
OracleReport cross_validate_records(const std::vector<SolutionRecord>& records, PolyCase c,
                                    std::uint32_t bound, std::uint64_t x_limit,
                                    unsigned workers = 1);

}  // namespace pellsmooth
