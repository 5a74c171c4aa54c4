#pragma once

#include <cstdint>
#include <vector>

#include "mmlp/bitset.hpp"
#include "mmlp/logic.hpp"
#include "mmlp/rng.hpp"

namespace mmlp::rulegen {

struct GenConfig {
    unsigned max_rule_size = 4;              // body literals per rule
    unsigned max_vars = 6;                   // distinct variables per rule
    std::uint64_t max_rules_per_size = 10000; // cap I per size stratum
    unsigned max_clauses = 5;                // rules per sampled program
    std::uint64_t program_samples = 10000;   // T sampled programs
    std::uint64_t rng_seed = 0;
};

/// All bias-conforming safe rules with exactly `size` body literals, unique up
/// to variable renaming, in canonical order. When the stratum exceeds the cap
/// the result is a deterministic uniform sample of it (seeded per size).
std::vector<logic::Rule> enumerate_rules(const logic::Task& task, const GenConfig& config,
                                         unsigned size);

/// Uniformly draws c ~ {1..max_clauses} distinct rules from the pool.
logic::Program random_program(const std::vector<logic::Rule>& pool, const GenConfig& config,
                              Rng& rng);

/// True when a substitution maps `general`'s head onto `specific`'s head and
/// `general`'s body into a subset of `specific`'s body.
bool theta_subsumes(const logic::Rule& general, const logic::Rule& specific);

/// Indices of rules kept after dropping every rule whose negative coverage
/// exceeds the tolerance ceil(r * n_negatives). Dropping exactly these rules
/// equals pruning all generalisations of over-tolerance rules, because
/// subsumption only ever grows coverage.
std::vector<std::size_t> prune_generalisations(const std::vector<Bitset>& neg_cov,
                                               std::uint64_t n_negatives, double r);

} // namespace mmlp::rulegen
