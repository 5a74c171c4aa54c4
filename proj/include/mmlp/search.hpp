#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mmlp/bitset.hpp"
#include "mmlp/logic.hpp"

namespace mmlp::search {

/// Piecewise-linear function through sampled breakpoints; evaluation clamps to
/// the sampled range.
class PLFunction {
public:
    PLFunction() = default;
    explicit PLFunction(std::vector<std::pair<double, double>> breakpoints);

    double eval(double x) const;
    /// Minimum of the function over [lo, hi] (candidates: the clamped ends and
    /// every interior breakpoint).
    double min_on(double lo, double hi) const;
    bool constant() const { return points_.size() <= 1; }
    const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }

    static PLFunction constant_fn(double y) { return PLFunction({{0.0, y}}); }

private:
    std::vector<std::pair<double, double>> points_;
};

/// Samples `exact_term` at n equally spaced integer abscissae spanning
/// [lo, hi] (both ends included; duplicates collapse).
PLFunction build_pl_approx(const std::function<double(std::uint64_t)>& exact_term,
                           std::uint64_t lo, std::uint64_t hi, unsigned n_breakpoints = 5);

/// Objective over rule subsets: base + sum of per-rule weights + PL terms in
/// the derived counts (true positives, false positives, total body literals).
struct SurrogateObjective {
    double base = 0.0;
    std::vector<double> rule_weight; // non-negative, one per rule
    PLFunction g_tp, g_fp, g_lits;
    std::uint64_t max_rules = UINT64_MAX;
    std::uint64_t max_body_literals = UINT64_MAX;

    double eval(std::uint64_t tp, std::uint64_t fp, std::uint64_t lits, double weight_sum) const {
        return base + weight_sum + g_tp.eval(static_cast<double>(tp)) +
               g_fp.eval(static_cast<double>(fp)) + g_lits.eval(static_cast<double>(lits));
    }
};

struct SearchBudget {
    double solver_time_per_call = 180.0; // seconds per optimize() call, advisory
    double trial_timeout = 1000.0;       // seconds per learning trial, advisory
    std::uint64_t max_nodes = 2'000'000; // binding node budget (determinism)
    std::size_t exhaustive_threshold = 16; // pools this small are fully enumerated
};

struct OptimizeResult {
    std::vector<std::vector<std::size_t>> candidates; // rule-index subsets, best first
    std::vector<double> scores;                       // surrogate score per candidate
    std::uint64_t nodes = 0;
    bool exhausted = false;              // whole feasible space was searched
    std::vector<double> incumbent_trace; // best-so-far scores, non-increasing
};

/// Anytime branch-and-bound over rule-inclusion subsets. Deterministic for a
/// fixed node budget; the wall-clock limits only cut losses on huge pools.
/// The empty subset is always among the returned candidates.
OptimizeResult optimize(const std::vector<Bitset>& pos_cov, const std::vector<Bitset>& neg_cov,
                        const std::vector<std::uint32_t>& body_lits,
                        const SurrogateObjective& objective, const SearchBudget& budget,
                        std::size_t top_k = 256);

struct SubsetCounts {
    std::uint64_t tp = 0, fp = 0, body_literals = 0;
};

/// Union-coverage counts of a rule subset, recomputed from raw bitsets.
SubsetCounts subset_counts(const std::vector<Bitset>& pos_cov, const std::vector<Bitset>& neg_cov,
                           const std::vector<std::uint32_t>& body_lits,
                           const std::vector<std::size_t>& subset);

/// Index of the candidate with the smallest exact cost; ties (within 1e-9 in
/// cost) go to fewer total literals, then the smaller serialization.
std::size_t rescore_exact(const std::vector<logic::Program>& candidates,
                          const std::function<double(const logic::Program&)>& exact_cost,
                          std::vector<double>* costs_out = nullptr);

} // namespace mmlp::search
