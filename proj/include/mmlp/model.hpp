#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mmlp/bitset.hpp"
#include "mmlp/logic.hpp"

namespace mmlp::logic {

/// Constant symbol table in sorted order, so constant ids are stable across
/// runs and machines.
class Interner {
public:
    Interner() = default;
    explicit Interner(std::vector<std::string> sorted_unique);

    std::uint32_t id(const std::string& name) const; // throws on unknown symbol
    std::optional<std::uint32_t> try_id(const std::string& name) const;
    const std::string& name(std::uint32_t id) const { return names_[id]; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

/// Ground relation over interned constants.
struct Relation {
    unsigned arity = 0;
    std::vector<std::vector<std::uint32_t>> rows;

    bool insert(std::span<const std::uint32_t> row, std::uint32_t n_constants);
    bool contains(std::span<const std::uint32_t> row, std::uint32_t n_constants) const;
    /// Row indices whose argument at pos equals c; empty span if none.
    std::span<const std::uint32_t> rows_with(unsigned pos, std::uint32_t c) const;

private:
    std::uint64_t pack(std::span<const std::uint32_t> row, std::uint32_t n_constants) const;
    std::unordered_set<std::uint64_t> packed_;
    std::vector<std::unordered_map<std::uint32_t, std::vector<std::uint32_t>>> by_pos_;
};

/// Ground-atom model keyed by predicate, with deterministic iteration order.
struct Model {
    Interner constants;
    std::map<std::string, Relation> relations;

    bool contains(const Atom& ground_atom) const;
    std::size_t fact_count() const;
};

/// Sorted unique constants appearing in background facts, background rule
/// constants, and example atoms.
std::vector<std::string> harvest_constants(const Task&);

/// Least fixpoint of the background facts and rules.
Model least_model(const Task&, std::size_t max_derived = 10'000'000);

/// Backtracking join engine for one rule against one model: argument codes
/// and relation pointers are resolved once, so a matcher can answer many
/// queries without per-call allocation. The model must outlive the matcher
/// and must not gain facts between queries.
class RuleMatcher {
public:
    RuleMatcher(const Rule& rule, const Model& model); // throws UnsafeRuleError

    /// True iff some grounding of the body derives the ground head atom.
    bool covers_atom(const Atom& ground_atom);
    /// Same, with head arguments already translated to model constant ids.
    bool covers_ids(std::span<const std::uint32_t> head_ids);
    /// Distinct derivable ground head tuples (constant ids), sorted.
    std::vector<std::vector<std::uint32_t>> head_tuples();

private:
    struct Arg {
        bool is_var = false;
        std::uint32_t value = 0; // variable index or constant id
    };
    struct Lit {
        const Relation* rel = nullptr;
        bool impossible = false;
        std::vector<Arg> args;
        std::vector<std::uint32_t> fixed; // scratch, one slot per argument
        std::vector<std::uint32_t> bound; // scratch trail of vars bound here
    };

    void reset();
    std::size_t select_literal() const;
    template <typename Sink> bool enumerate(std::size_t remaining, Sink& sink);
    template <typename Sink> bool match(Lit& lit, std::size_t remaining, Sink& sink);

    const Rule& rule_;
    const Model& model_;
    std::uint32_t n_constants_ = 0;
    std::vector<Arg> head_;
    bool head_possible_ = true;
    std::vector<Lit> body_;
    std::vector<std::uint32_t> bindings_;
    std::vector<bool> done_;
    std::vector<std::uint32_t> id_scratch_;
};

/// True iff some grounding of the rule derives ground_atom from the model.
bool covers(const Rule&, const Model&, const Atom& ground_atom);

/// All head-variable tuples derivable for the rule, sorted, deduplicated.
std::vector<std::vector<std::uint32_t>> entailed_head_tuples(const Rule&, const Model&);

/// Per-rule statistics cached by the learners.
struct RuleStats {
    Bitset example_cov;          // examples indexed positives first
    std::uint32_t body_literals = 0;
    double syntax_bits = 0.0;    // per-rule syntax length, filled by learners
};

/// Coverage of each rule over task examples (positives first, then negatives).
std::vector<RuleStats> coverage_bitsets(const std::vector<Rule>&, const Task&, const Model&);

} // namespace mmlp::logic
