#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <memory>
#include <vector>

#include "pellsmooth/infra.hpp"
#include "pellsmooth/util.hpp"

namespace pellsmooth {

struct RegulatorOptions {
    // Beyond this radicand the unconditional methods are not attempted.
    mpz_class d_ceiling = mpz_class("1000000000000000000000");  // 10^21
    // Baby-step budget; the cycle walk switches to giant steps past this many
    // plain continued-fraction steps.
    std::size_t baby_step_cap = 6'000'000;
    bool force_bsgs = false;  // testing hook
};

struct Regulator {
    mpz_class d;
    Real value;                   // ln(eta_d)
    double dvalue = 0.0;
    double abs_error_bound = 0.0;
    std::size_t cf_period = 0;    // set when the whole cycle was walked
    bool period_known = false;
    enum class Method { cf_sum, bsgs } method = Method::cf_sum;
    // Power-product chain for eta_d produced while refining the value;
    // build_compact reuses it instead of walking again.
    std::shared_ptr<const std::vector<CompactTerm>> unit_terms;
};

// Working precision rule: enough head-room that log-side comparisons stay
// far below ln(2)/2 after the doubling chain.
int default_precision_bits(const mpz_class& d);

Regulator regulator(const FieldCtx& ctx, int precision_bits, const RegulatorOptions& opts = {});
Regulator regulator(const mpz_class& d, int precision_bits = 0, const RegulatorOptions& opts = {});

// MPFR evaluation of ln(prod_j (alpha_j/d_j)^(2^(k-j))) for a term chain.
Real terms_log(const FieldCtx& ctx, const std::vector<CompactTerm>& terms, mpfr_prec_t prec);

}  // namespace pellsmooth
