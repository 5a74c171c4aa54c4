#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmlp/bitset.hpp"
#include "mmlp/logic.hpp"
#include "mmlp/model.hpp"

namespace mmlp::herbrand {

/// Ground-atom universe of a task: every predicate applied to every tuple of
/// task constants. Atom populations are kept as counts; only target atoms are
/// ever materialised (by index).
struct HerbrandBase {
    logic::Interner constants;
    logic::PredSig target;
    std::map<std::string, std::uint64_t> per_predicate_counts; // includes the target
    std::uint64_t total_target_atoms = 0;
    std::uint64_t total_atoms = 0;

    bool contains(const logic::Atom& a) const;
    /// Mixed-radix rank of a ground target atom in [0, total_target_atoms).
    std::uint64_t target_index(const logic::Atom& a) const;
    logic::Atom target_atom(std::uint64_t index) const;
};

HerbrandBase build_herbrand_base(const logic::Task& task, std::uint64_t max_atoms = 10'000'000);

enum class PriorMode { generality, uniform };

/// Normalised code-book weights over the declared body predicates.
struct PredicatePriors {
    std::map<std::string, double> weight;

    double at(const std::string& pred) const;
};

/// Under `generality` a body predicate's weight is proportional to how many
/// ground atoms it contributes to the Herbrand base; `uniform` splits evenly.
PredicatePriors predicate_priors(const logic::Task& task, const HerbrandBase& hb, PriorMode mode);

/// Number of ground target atoms entailed by a program (union over rules).
std::uint64_t entailed_space_size(const logic::Program& program, const HerbrandBase& hb,
                                  const logic::Model& model);

/// Bit per ground target atom (by target_index) entailed by a single rule.
Bitset entailed_target_bitset(const logic::Rule& rule, const HerbrandBase& hb,
                              const logic::Model& model);

} // namespace mmlp::herbrand
