#include "mmlp/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mmlp/errors.hpp"
#include "mmlp/numerics.hpp"

namespace mmlp::cost {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kThetaEps = 1e-12;
/// Additive constant of the two-sided MML estimate for a Bernoulli parameter,
/// in bits, as used by theta_length.
constexpr double kThetaConst = 0.7425;
} // namespace

double log2_partition(std::uint64_t l) { return mmlp::log2_partition(l); }

double preds_length(const logic::Rule& rule, const herbrand::PredicatePriors& priors) {
    if (rule.body.empty()) return 0.0;
    std::map<std::string, std::uint64_t> freq;
    for (const auto& a : rule.body) ++freq[a.pred];

    double bits = -log2_factorial(rule.body.size());
    for (const auto& [pred, fr] : freq) {
        const double p = priors.at(pred);
        if (p <= 0.0) throw InvalidArgumentError("body predicate has zero prior: " + pred);
        bits += log2_factorial(fr) - static_cast<double>(fr) * std::log2(p);
    }
    return bits;
}

std::uint64_t var_freqs_count(const logic::Rule& rule) {
    const std::uint64_t d_vars = logic::distinct_body_vars(rule).size();
    const std::uint64_t slots = logic::body_var_slots(rule);
    if (d_vars == 0) return 1;
    return binomial_u64(d_vars + slots - 1, d_vars - 1);
}

namespace {
/// Body variable frequencies plus the count of body-only variables.
struct VarProfile {
    std::vector<std::uint64_t> freqs;
    std::uint64_t body_only = 0;
    std::uint64_t slots = 0;
};

VarProfile var_profile(const logic::Rule& rule) {
    std::map<std::uint32_t, std::uint64_t> freq;
    for (const auto& a : rule.body)
        for (const auto& t : a.args)
            if (t.is_var()) ++freq[t.var];
    VarProfile prof;
    for (const auto& [v, fr] : freq) {
        prof.freqs.push_back(fr);
        prof.slots += fr;
    }
    prof.body_only = logic::body_only_vars(rule).size();
    return prof;
}
} // namespace

std::uint64_t var_seqs_count(const logic::Rule& rule) {
    const VarProfile prof = var_profile(rule);
    if (prof.slots == 0) return 1;
    std::uint64_t numerator = factorial_u64(prof.slots);
    std::uint64_t denom = factorial_u64(prof.body_only);
    for (std::uint64_t fr : prof.freqs) {
        // Divide stepwise so intermediate values stay exact.
        const std::uint64_t f = factorial_u64(fr);
        if (numerator % f == 0) {
            numerator /= f;
        } else {
            denom *= f;
        }
    }
    if (numerator % denom != 0)
        throw InvalidArgumentError("variable sequence count is not integral for rule: " +
                                   logic::to_string(rule));
    return numerator / denom;
}

double var_seqs_log2(const logic::Rule& rule) {
    const VarProfile prof = var_profile(rule);
    if (prof.slots == 0) return 0.0;
    double bits = log2_factorial(prof.slots) - log2_factorial(prof.body_only);
    for (std::uint64_t fr : prof.freqs) bits -= log2_factorial(fr);
    return bits;
}

double rule_syntax_length(const logic::Rule& rule, const herbrand::PredicatePriors& priors) {
    if (rule.body.empty()) return 0.0;
    return preds_length(rule, priors) + std::log2(static_cast<double>(var_freqs_count(rule))) +
           var_seqs_log2(rule);
}

double program_syntax_length(const logic::Program& program,
                             const herbrand::PredicatePriors& priors,
                             std::uint64_t max_total_literals) {
    const std::uint64_t l = program.total_body_literals();
    if (l > max_total_literals)
        throw BiasViolationError("program exceeds the literal budget");
    double bits = log2_partition(l);
    for (const auto& r : program.rules) bits += rule_syntax_length(r, priors);
    return bits;
}

double theta_estimate(std::uint64_t successes, std::uint64_t failures, const BetaPrior& prior) {
    const double s = static_cast<double>(successes);
    const double f = static_cast<double>(failures);
    const double theta = (s + prior.alpha - 0.5) / (s + f + prior.alpha + prior.beta - 1.0);
    return std::clamp(theta, kThetaEps, 1.0 - kThetaEps);
}

double theta_length(std::uint64_t successes, std::uint64_t failures, const BetaPrior& prior) {
    const double theta = theta_estimate(successes, failures, prior);
    const double k = -log2_beta(prior.alpha, prior.beta) - kThetaConst +
                     log2_binomial(successes + failures, successes);
    return -(prior.alpha - 0.5) * std::log2(theta) -
           (prior.beta - 0.5) * std::log2(1.0 - theta) + k;
}

double group_size_length(std::uint64_t k, std::uint64_t P, std::uint64_t Nn, double r) {
    if (r <= 0.0 || r >= 1.0) throw InvalidArgumentError("prior error rate must lie in (0,1)");
    const std::uint64_t tp_lo = k > Nn ? k - Nn : 0;
    const std::uint64_t tp_hi = std::min(k, P);
    if (tp_lo > tp_hi)
        throw InvalidArgumentError("no tp/fp split realises the requested covered count");

    const double log2_r = std::log2(r);
    const double log2_not_r = std::log2(1.0 - r);
    std::vector<double> terms;
    terms.reserve(tp_hi - tp_lo + 1);
    for (std::uint64_t tp = tp_lo; tp <= tp_hi; ++tp) {
        const std::uint64_t fp = k - tp;
        const std::uint64_t tn = Nn - fp;
        const std::uint64_t fn = P - tp;
        terms.push_back(log2_binomial(P, tp) + static_cast<double>(tp) * log2_not_r +
                        static_cast<double>(fn) * log2_r + log2_binomial(Nn, tn) +
                        static_cast<double>(tn) * log2_not_r + static_cast<double>(fp) * log2_r);
    }
    return -log2_sum_exp2(terms);
}

double literals_length(const ConfusionCounts& counts, std::uint64_t e_plus,
                       std::uint64_t e_minus) {
    if (counts.covered() > e_plus || counts.uncovered() > e_minus) return kInf;
    return log2_binomial(e_plus, counts.covered()) + log2_binomial(e_minus, counts.uncovered());
}

double truth_length(const ConfusionCounts& counts, const ThetaPair& thetas) {
    return -(static_cast<double>(counts.tp) * std::log2(thetas.theta_plus) +
             static_cast<double>(counts.fp) * std::log2(1.0 - thetas.theta_plus) +
             static_cast<double>(counts.tn) * std::log2(thetas.theta_minus) +
             static_cast<double>(counts.fn) * std::log2(1.0 - thetas.theta_minus));
}

ThetaPair fit_thetas(const ConfusionCounts& counts, const BetaPrior& prior) {
    return {theta_estimate(counts.tp, counts.fp, prior),
            theta_estimate(counts.tn, counts.fn, prior)};
}

CostBreakdown mml_total(const logic::Program& program, const ConfusionCounts& counts,
                        const CostContext& context) {
    CostBreakdown b;
    b.thetas = fit_thetas(counts, context.prior);
    b.c_syntax = program_syntax_length(program, context.pred_priors, context.max_total_literals);
    b.c_theta = theta_length(counts.tp, counts.fp, context.prior) +
                theta_length(counts.tn, counts.fn, context.prior);
    b.c_groupsize = group_size_length(counts.covered(), counts.positives(), counts.negatives(),
                                      context.prior.error_rate());
    b.c_lits = literals_length(counts, context.e_plus, context.e_minus);
    b.c_truth = truth_length(counts, b.thetas);
    b.total = b.c_syntax + b.c_theta + b.c_groupsize + b.c_lits + b.c_truth;
    return b;
}

std::uint64_t cmdl_cost(std::uint64_t program_size, std::uint64_t fp, std::uint64_t fn) {
    return program_size + fp + fn;
}

std::pair<bool, double> predict(const logic::Program& program, const ThetaPair& thetas,
                                const logic::Model& bk_model, const logic::Atom& ground_atom) {
    bool covered = false;
    for (const auto& r : program.rules) {
        if (logic::covers(r, bk_model, ground_atom)) {
            covered = true;
            break;
        }
    }
    const double prob_true = covered ? thetas.theta_plus : 1.0 - thetas.theta_minus;
    return {prob_true > 0.5, prob_true};
}

} // namespace mmlp::cost
