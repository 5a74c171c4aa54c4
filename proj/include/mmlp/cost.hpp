#pragma once

#include <cstdint>
#include <utility>

#include "mmlp/herbrand.hpp"
#include "mmlp/logic.hpp"
#include "mmlp/model.hpp"

namespace mmlp::cost {

struct ConfusionCounts {
    std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::uint64_t covered() const { return tp + fp; }
    std::uint64_t uncovered() const { return tn + fn; }
    std::uint64_t positives() const { return tp + fn; }
    std::uint64_t negatives() const { return tn + fp; }
    std::uint64_t total() const { return tp + fp + tn + fn; }
    std::uint64_t errors() const { return fp + fn; }
};

struct BetaPrior {
    double alpha = 1.0;
    double beta = 1.0;

    double mean() const { return alpha / (alpha + beta); }
    /// Prior probability of a classification error, r = 1 - mean.
    double error_rate() const { return beta / (alpha + beta); }

    static BetaPrior noiseless() { return {1e6, 1.0}; }
    static BetaPrior noisy() { return {5000.0, 1.0}; }
};

struct ThetaPair {
    double theta_plus = 0.5;
    double theta_minus = 0.5;
};

struct CostBreakdown {
    double c_syntax = 0;
    double c_theta = 0;
    double c_groupsize = 0;
    double c_lits = 0;
    double c_truth = 0;
    double total = 0;
    ThetaPair thetas;
};

/// Everything mml_total needs besides the hypothesis and its confusion counts.
/// e_plus/e_minus are the sizes of the entailed / non-entailed portions of the
/// ground target-atom space under this hypothesis.
struct CostContext {
    herbrand::PredicatePriors pred_priors;
    BetaPrior prior;
    std::uint64_t e_plus = 0;
    std::uint64_t e_minus = 0;
    std::uint64_t max_total_literals = 20;
};

/// log2 of the number of unrestricted integer partitions of l.
double log2_partition(std::uint64_t l);

/// Multinomial code length of a rule's body predicate symbols under the prior.
double preds_length(const logic::Rule& rule, const herbrand::PredicatePriors& priors);

/// Stars-and-bars count of variable-frequency assignments over the body slots.
std::uint64_t var_freqs_count(const logic::Rule& rule);

/// Number of distinguishable body variable sequences given the frequencies;
/// body-only variables are interchangeable. Exact integer version.
std::uint64_t var_seqs_count(const logic::Rule& rule);
/// log2 of the same quantity, always finite (used on the cost path).
double var_seqs_log2(const logic::Rule& rule);

double rule_syntax_length(const logic::Rule& rule, const herbrand::PredicatePriors& priors);
double program_syntax_length(const logic::Program& program,
                             const herbrand::PredicatePriors& priors,
                             std::uint64_t max_total_literals);

double theta_estimate(std::uint64_t successes, std::uint64_t failures, const BetaPrior& prior);
double theta_length(std::uint64_t successes, std::uint64_t failures, const BetaPrior& prior);

/// Length of transmitting how many examples the hypothesis covers, given that
/// the receiver knows P positives and Nn negatives exist and the prior error
/// rate r. k = tp+fp.
double group_size_length(std::uint64_t k, std::uint64_t P, std::uint64_t Nn, double r);

/// Length of identifying which examples were covered within the entailed and
/// non-entailed atom spaces; +infinity when the counts cannot fit the spaces.
double literals_length(const ConfusionCounts& counts, std::uint64_t e_plus,
                       std::uint64_t e_minus);

double truth_length(const ConfusionCounts& counts, const ThetaPair& thetas);

ThetaPair fit_thetas(const ConfusionCounts& counts, const BetaPrior& prior);

CostBreakdown mml_total(const logic::Program& program, const ConfusionCounts& counts,
                        const CostContext& context);

std::uint64_t cmdl_cost(std::uint64_t program_size, std::uint64_t fp, std::uint64_t fn);

/// Probability the atom is true under the hypothesis: theta_plus when some
/// rule covers it, 1 - theta_minus otherwise. Label is probability > 0.5.
std::pair<bool, double> predict(const logic::Program& program, const ThetaPair& thetas,
                                const logic::Model& bk_model, const logic::Atom& ground_atom);

} // namespace mmlp::cost
