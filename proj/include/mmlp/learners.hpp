#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmlp/bitset.hpp"
#include "mmlp/cost.hpp"
#include "mmlp/herbrand.hpp"
#include "mmlp/logic.hpp"
#include "mmlp/model.hpp"
#include "mmlp/rulegen.hpp"
#include "mmlp/search.hpp"

namespace mmlp::learners {

enum class CostKind { mml, cmdl };

std::string to_string(CostKind kind);

struct Provenance {
    std::string learner;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
};

struct LearnedHypothesis {
    logic::Program program;
    cost::ThetaPair thetas;
    cost::ConfusionCounts counts;
    cost::CostBreakdown breakdown; // populated for MML
    std::uint64_t cmdl = 0;        // populated for C-MDL
    CostKind cost_kind = CostKind::mml;
    std::uint64_t e_plus = 0;
    std::uint64_t e_minus = 0;
    Provenance provenance;

    double exact_cost() const {
        return cost_kind == CostKind::mml ? breakdown.total : static_cast<double>(cmdl);
    }
};

struct LearnOptions {
    rulegen::GenConfig gen;
    cost::BetaPrior prior = cost::BetaPrior::noiseless();
    herbrand::PriorMode prior_mode = herbrand::PriorMode::generality;
    search::SearchBudget budget;
};

/// Everything derivable from a task before any search: model, Herbrand base,
/// candidate rule pool, per-rule coverage/entailment bitsets, cached syntax
/// lengths. Variants of the same task that only relabel or subsample examples
/// can reuse all of it via with_examples.
struct PreparedTask {
    logic::Task task;
    logic::Model model;
    herbrand::HerbrandBase hb;
    herbrand::PredicatePriors pred_priors;
    cost::BetaPrior prior;
    herbrand::PriorMode prior_mode = herbrand::PriorMode::generality;

    std::vector<logic::Rule> pool;
    std::vector<Bitset> pos_cov, neg_cov;   // per rule, over training examples
    std::vector<Bitset> target_cov;         // per rule, over ground target atoms
    std::vector<double> syntax_bits;        // rule_syntax_length per rule
    std::vector<std::uint32_t> body_lits;

    static PreparedTask build(const logic::Task& task, const rulegen::GenConfig& gen,
                              const cost::BetaPrior& prior, herbrand::PriorMode mode);

    /// Same pool/model/entailment, coverage re-derived for a task whose
    /// example atoms are a (relabeled) subset of this one's.
    PreparedTask with_examples(const logic::Task& variant) const;

    cost::ConfusionCounts counts_for(const std::vector<std::size_t>& subset) const;
    std::uint64_t entailed_size(const std::vector<std::size_t>& subset) const;
    logic::Program program_for(const std::vector<std::size_t>& subset) const;
    cost::CostContext context_for(const std::vector<std::size_t>& subset) const;
    double exact_mml(const std::vector<std::size_t>& subset,
                     cost::CostBreakdown* out = nullptr) const;
    std::uint64_t exact_cmdl(const std::vector<std::size_t>& subset) const;
};

LearnedHypothesis random_learn(const PreparedTask& prepared, CostKind kind,
                               const LearnOptions& options);
/// One candidate stream scored under both costs; first = MML, second = C-MDL.
std::pair<LearnedHypothesis, LearnedHypothesis> random_learn_paired(const PreparedTask& prepared,
                                                                    const LearnOptions& options);

LearnedHypothesis approx_learn(const PreparedTask& prepared, CostKind kind,
                               const LearnOptions& options);

struct EvalMetrics {
    double balanced_accuracy = 0.0;
    cost::ConfusionCounts counts;
};

EvalMetrics evaluate(const LearnedHypothesis& hypothesis,
                     const std::vector<logic::Atom>& test_positives,
                     const std::vector<logic::Atom>& test_negatives, const logic::Model& model);

} // namespace mmlp::learners
