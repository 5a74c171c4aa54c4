#include "mmlp/herbrand.hpp"

#include <algorithm>
#include <cstdint>

#include "mmlp/errors.hpp"
#include "mmlp/model.hpp"

namespace mmlp::herbrand {

using logic::Atom;
using logic::Term;

bool HerbrandBase::contains(const Atom& a) const {
    auto it = per_predicate_counts.find(a.pred);
    if (it == per_predicate_counts.end() || !a.ground()) return false;
    std::uint64_t expected = 1;
    for (std::size_t i = 0; i < a.args.size(); ++i) expected *= constants.size();
    if (it->second != expected) return false; // arity mismatch with the declared one
    for (const auto& t : a.args)
        if (!constants.try_id(t.name)) return false;
    return true;
}

std::uint64_t HerbrandBase::target_index(const Atom& a) const {
    if (a.pred != target.name || a.arity() != target.arity || !a.ground())
        throw InvalidArgumentError("not a ground target atom: " + logic::to_string(a));
    std::uint64_t idx = 0;
    for (const auto& t : a.args) idx = idx * constants.size() + constants.id(t.name);
    return idx;
}

Atom HerbrandBase::target_atom(std::uint64_t index) const {
    if (index >= total_target_atoms) throw InvalidArgumentError("target atom index out of range");
    std::vector<Term> args(target.arity);
    for (unsigned i = target.arity; i-- > 0;) {
        args[i] = Term::make_const(constants.name(static_cast<std::uint32_t>(index % constants.size())));
        index /= constants.size();
    }
    return Atom{target.name, std::move(args)};
}

HerbrandBase build_herbrand_base(const logic::Task& task, std::uint64_t max_atoms) {
    HerbrandBase hb;
    hb.constants = logic::Interner(logic::harvest_constants(task));
    hb.target = task.target;
    if (hb.constants.size() == 0) throw InvalidArgumentError("task has no constants");

    auto atoms_of = [&](unsigned arity) {
        std::uint64_t n = 1;
        for (unsigned i = 0; i < arity; ++i) {
            if (n > max_atoms / std::max<std::uint64_t>(hb.constants.size(), 1) + 1)
                throw ResourceLimitError("Herbrand base exceeds the atom ceiling");
            n *= hb.constants.size();
        }
        return n;
    };

    hb.per_predicate_counts[task.target.name] = atoms_of(task.target.arity);
    for (const auto& sig : task.bias.body_predicates) {
        if (sig.name == task.target.name) continue;
        hb.per_predicate_counts[sig.name] = atoms_of(sig.arity);
    }
    hb.total_target_atoms = hb.per_predicate_counts[task.target.name];

    hb.total_atoms = 0;
    for (const auto& [_, n] : hb.per_predicate_counts) {
        if (hb.total_atoms > max_atoms - n)
            throw ResourceLimitError("Herbrand base exceeds the atom ceiling");
        hb.total_atoms += n;
    }
    return hb;
}

double PredicatePriors::at(const std::string& pred) const {
    auto it = weight.find(pred);
    if (it == weight.end())
        throw InvalidArgumentError("predicate has no prior weight: " + pred);
    return it->second;
}

PredicatePriors predicate_priors(const logic::Task& task, const HerbrandBase& hb, PriorMode mode) {
    PredicatePriors priors;
    std::vector<std::string> preds;
    for (const auto& sig : task.bias.body_predicates)
        if (sig.name != task.target.name) preds.push_back(sig.name);
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    if (preds.empty()) throw InvalidArgumentError("no body predicates to put a prior over");

    if (mode == PriorMode::uniform) {
        for (const auto& p : preds) priors.weight[p] = 1.0 / static_cast<double>(preds.size());
        return priors;
    }

    double total = 0;
    for (const auto& p : preds) total += static_cast<double>(hb.per_predicate_counts.at(p));
    if (total <= 0) throw InvalidArgumentError("degenerate predicate prior normalisation");
    for (const auto& p : preds)
        priors.weight[p] = static_cast<double>(hb.per_predicate_counts.at(p)) / total;
    return priors;
}

Bitset entailed_target_bitset(const logic::Rule& rule, const HerbrandBase& hb,
                              const logic::Model& model) {
    if (rule.head.pred != hb.target.name || rule.head.arity() != hb.target.arity)
        throw InvalidArgumentError("rule head is not the target predicate: " + logic::to_string(rule));
    Bitset bits(hb.total_target_atoms);

    // The model and the Herbrand base share the same constant harvest, so ids
    // line up; translate defensively anyway.
    std::vector<std::uint32_t> translate(hb.constants.size(), UINT32_MAX);
    for (std::uint32_t c = 0; c < hb.constants.size(); ++c)
        if (auto id = model.constants.try_id(hb.constants.name(c))) translate[c] = *id;

    logic::RuleMatcher matcher(rule, model);
    std::vector<std::uint32_t> ids(hb.target.arity);
    for (std::uint64_t idx = 0; idx < hb.total_target_atoms; ++idx) {
        std::uint64_t rest = idx;
        bool known = true;
        for (unsigned i = hb.target.arity; i-- > 0;) {
            const std::uint32_t model_id =
                translate[static_cast<std::uint32_t>(rest % hb.constants.size())];
            rest /= hb.constants.size();
            if (model_id == UINT32_MAX) {
                known = false;
                break;
            }
            ids[i] = model_id;
        }
        if (known && matcher.covers_ids(ids)) bits.set(idx);
    }
    return bits;
}

std::uint64_t entailed_space_size(const logic::Program& program, const HerbrandBase& hb,
                                  const logic::Model& model) {
    if (program.empty()) return 0;
    Bitset all(hb.total_target_atoms);
    for (const auto& r : program.rules) all |= entailed_target_bitset(r, hb, model);
    return all.count();
}

} // namespace mmlp::herbrand
