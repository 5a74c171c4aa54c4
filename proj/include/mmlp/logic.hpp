#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace mmlp::logic {

enum class TermKind { variable, constant };

/// A term is either a variable (identified by index, printed V0, V1, ...)
/// or a constant symbol.
struct Term {
    TermKind kind = TermKind::variable;
    std::uint32_t var = 0; // meaningful when kind == variable
    std::string name;      // meaningful when kind == constant

    static Term make_var(std::uint32_t index) { return Term{TermKind::variable, index, {}}; }
    static Term make_const(std::string symbol) { return Term{TermKind::constant, 0, std::move(symbol)}; }
    bool is_var() const { return kind == TermKind::variable; }
    auto operator<=>(const Term&) const = default;
};

struct Atom {
    std::string pred;
    std::vector<Term> args;

    unsigned arity() const { return static_cast<unsigned>(args.size()); }
    bool ground() const;
    auto operator<=>(const Atom&) const = default;
};

/// Definite clause head :- body. Facts are represented as plain Atoms, not
/// as empty-body rules.
struct Rule {
    Atom head;
    std::vector<Atom> body;

    std::size_t body_literals() const { return body.size(); }
    std::size_t total_literals() const { return 1 + body.size(); }
    auto operator<=>(const Rule&) const = default;
};

/// Rule set in canonical order: by literal count, then serialized text.
struct Program {
    std::vector<Rule> rules;

    bool empty() const { return rules.empty(); }
    std::size_t size() const { return rules.size(); }
    std::size_t total_body_literals() const;
    std::size_t total_literals() const; // heads included
    auto operator<=>(const Program&) const = default;
};

struct PredSig {
    std::string name;
    unsigned arity = 0;
    auto operator<=>(const PredSig&) const = default;
};

struct Bias {
    std::vector<PredSig> body_predicates;
    unsigned max_body_literals_per_rule = 4;
    unsigned max_vars_per_rule = 6;
    unsigned max_rules = 5;
    unsigned max_total_literals = 20; // body literals across the whole program
};

struct Task {
    std::vector<Atom> background_facts; // ground
    std::vector<Rule> background_rules; // non-target heads, definite
    std::vector<Atom> positives;
    std::vector<Atom> negatives;
    Bias bias;
    PredSig target;
};

std::string to_string(const Term&);
std::string to_string(const Atom&);
std::string to_string(const Rule&);
std::string to_string(const Program&);

/// Distinct variable indices in order of first appearance (head, then body).
std::vector<std::uint32_t> distinct_vars(const Rule&);
/// Distinct variables appearing in the body, in first-appearance order.
std::vector<std::uint32_t> distinct_body_vars(const Rule&);
/// Variables appearing in the body but not in the head.
std::vector<std::uint32_t> body_only_vars(const Rule&);
/// Total arity of all body literals.
std::size_t body_var_slots(const Rule&);

/// Safe: every head variable occurs in at least one body literal.
bool is_safe(const Rule&);
bool conforms_to_bias(const Rule&, const Bias&, const PredSig& target);

/// Renaming-canonical form: head variables become V0..Va-1 in head order,
/// body-only variables are relabelled to minimize the serialized rule over
/// all permutations; body literals sorted.
Rule canonical_rule(const Rule&);
/// Canonicalizes every rule, removes renaming duplicates, sorts.
Program canonical_program(std::vector<Rule> rules);

} // namespace mmlp::logic
