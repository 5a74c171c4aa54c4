#include "mmlp/rulegen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mmlp/errors.hpp"

namespace mmlp::rulegen {

using logic::Atom;
using logic::Rule;
using logic::Term;

namespace {

/// Generates every body as a strictly increasing sequence of atoms under the
/// (predicate, argument-tuple) order, introducing fresh variables gaplessly.
/// Every rule has at least one such presentation up to renaming, so the
/// enumeration is complete; canonicalization plus dedup removes the rest.
class BodyEnumerator {
public:
    BodyEnumerator(const logic::Task& task, unsigned size, unsigned max_vars)
        : size_(size), max_vars_(max_vars), target_(task.target) {
        for (const auto& sig : task.bias.body_predicates)
            if (sig.name != task.target.name) preds_.push_back(sig);
        std::sort(preds_.begin(), preds_.end(),
                  [](const logic::PredSig& a, const logic::PredSig& b) {
                      return std::tie(a.name, a.arity) < std::tie(b.name, b.arity);
                  });
        preds_.erase(std::unique(preds_.begin(), preds_.end(),
                                 [](const logic::PredSig& a, const logic::PredSig& b) {
                                     return a.name == b.name && a.arity == b.arity;
                                 }),
                     preds_.end());
    }

    template <typename Emit>
    void run(Emit&& emit) {
        std::vector<Term> head_args;
        for (unsigned i = 0; i < target_.arity; ++i) head_args.push_back(Term::make_var(i));
        head_ = Atom{target_.name, std::move(head_args)};
        body_.clear();
        extend(target_.arity, emit);
    }

private:
    template <typename Emit>
    void extend(unsigned used_vars, Emit& emit) {
        if (body_.size() == size_) {
            Rule r{head_, body_};
            if (logic::is_safe(r)) emit(r);
            return;
        }
        for (const auto& sig : preds_) {
            if (!body_.empty() && sig.name < body_.back().pred) continue;
            Atom atom{sig.name, std::vector<Term>(sig.arity)};
            fill_args(atom, 0, used_vars, emit);
        }
    }

    template <typename Emit>
    void fill_args(Atom& atom, unsigned pos, unsigned used_vars, Emit& emit) {
        if (pos == atom.args.size()) {
            if (!body_.empty() && !(body_.back() < atom)) return; // keep strictly increasing
            body_.push_back(atom);
            extend(used_vars, emit);
            body_.pop_back();
            return;
        }
        const unsigned limit = std::min(used_vars + 1, max_vars_); // fresh var allowed last
        for (unsigned v = 0; v < limit; ++v) {
            atom.args[pos] = Term::make_var(v);
            fill_args(atom, pos + 1, std::max(used_vars, v + 1), emit);
        }
    }

    unsigned size_;
    unsigned max_vars_;
    logic::PredSig target_;
    std::vector<logic::PredSig> preds_;
    Atom head_;
    std::vector<Atom> body_;
};

} // namespace

std::vector<Rule> enumerate_rules(const logic::Task& task, const GenConfig& config,
                                  unsigned size) {
    const unsigned size_cap =
        std::min<unsigned>(config.max_rule_size, task.bias.max_body_literals_per_rule);
    const unsigned var_cap = std::min<unsigned>(config.max_vars, task.bias.max_vars_per_rule);
    if (size < 1 || size > size_cap || task.target.arity > var_cap) return {};

    std::set<Rule> seen;
    std::vector<Rule> stream; // first-occurrence canonical order
    BodyEnumerator gen(task, size, var_cap);
    gen.run([&](const Rule& r) {
        Rule canon = logic::canonical_rule(r);
        if (!logic::conforms_to_bias(canon, task.bias, task.target)) return;
        if (seen.insert(canon).second) stream.push_back(std::move(canon));
    });

    const std::uint64_t cap = config.max_rules_per_size;
    if (cap == 0 || stream.size() <= cap) return stream;

    // Deterministic uniform sample without replacement: reservoir over the
    // canonical stream, seeded per size stratum.
    Rng rng(config.rng_seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(size) + 1)));
    std::vector<Rule> keep(stream.begin(), stream.begin() + cap);
    for (std::uint64_t t = cap; t < stream.size(); ++t) {
        const std::uint64_t j = rng.below(t + 1);
        if (j < cap) keep[j] = stream[t];
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

logic::Program random_program(const std::vector<Rule>& pool, const GenConfig& config, Rng& rng) {
    if (pool.empty()) throw InvalidArgumentError("cannot sample a program from an empty pool");
    const std::uint64_t c_max = std::min<std::uint64_t>(config.max_clauses, pool.size());
    const std::uint64_t c = 1 + rng.below(std::max<std::uint64_t>(c_max, 1));
    std::vector<Rule> rules;
    for (std::uint64_t idx : rng.sample_indices(pool.size(), c)) rules.push_back(pool[idx]);
    return logic::canonical_program(std::move(rules));
}

namespace {

bool match_term(const Term& pattern, const Term& target, std::vector<int>& var_map) {
    if (!pattern.is_var()) return !target.is_var() && pattern.name == target.name;
    if (target.is_var()) {
        int& slot = var_map[pattern.var];
        if (slot < 0) {
            slot = static_cast<int>(target.var);
            return true;
        }
        return slot == static_cast<int>(target.var);
    }
    return false; // pools are constant-free; a var never maps to a constant
}

bool match_body(const std::vector<Atom>& general, const std::vector<Atom>& specific,
                std::size_t next, std::vector<int>& var_map) {
    if (next == general.size()) return true;
    const Atom& g = general[next];
    for (const Atom& s : specific) {
        if (s.pred != g.pred || s.arity() != g.arity()) continue;
        std::vector<int> saved = var_map;
        bool ok = true;
        for (std::size_t i = 0; i < g.args.size() && ok; ++i)
            ok = match_term(g.args[i], s.args[i], var_map);
        if (ok && match_body(general, specific, next + 1, var_map)) return true;
        var_map = std::move(saved);
    }
    return false;
}

} // namespace

bool theta_subsumes(const Rule& general, const Rule& specific) {
    if (general.head.pred != specific.head.pred ||
        general.head.arity() != specific.head.arity())
        return false;

    std::uint32_t max_var = 0;
    for (std::uint32_t v : logic::distinct_vars(general)) max_var = std::max(max_var, v);
    std::vector<int> var_map(max_var + 1, -1);

    for (std::size_t i = 0; i < general.head.args.size(); ++i)
        if (!match_term(general.head.args[i], specific.head.args[i], var_map)) return false;
    return match_body(general.body, specific.body, 0, var_map);
}

std::vector<std::size_t> prune_generalisations(const std::vector<Bitset>& neg_cov,
                                               std::uint64_t n_negatives, double r) {
    const std::uint64_t tolerance =
        static_cast<std::uint64_t>(std::ceil(r * static_cast<double>(n_negatives)));
    std::vector<std::size_t> kept;
    kept.reserve(neg_cov.size());
    for (std::size_t i = 0; i < neg_cov.size(); ++i)
        if (neg_cov[i].count() <= tolerance) kept.push_back(i);
    return kept;
}

} // namespace mmlp::rulegen
