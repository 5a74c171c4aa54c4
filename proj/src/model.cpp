#include "mmlp/model.hpp"

#include <algorithm>
#include <set>

#include "mmlp/errors.hpp"

namespace mmlp::logic {

namespace {
constexpr std::uint32_t kUnbound = UINT32_MAX;

void check_head_safe(const Rule& r) {
    if (!is_safe(r))
        throw UnsafeRuleError("head variable unbound by body in rule: " + to_string(r));
}
} // namespace

Interner::Interner(std::vector<std::string> sorted_unique) : names_(std::move(sorted_unique)) {
    ids_.reserve(names_.size());
    for (std::uint32_t i = 0; i < names_.size(); ++i) ids_.emplace(names_[i], i);
}

std::uint32_t Interner::id(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw Error("unknown constant: " + name);
    return it->second;
}

std::optional<std::uint32_t> Interner::try_id(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Relation::pack(std::span<const std::uint32_t> row, std::uint32_t n_constants) const {
    const std::uint64_t base = std::max<std::uint32_t>(n_constants, 1);
    std::uint64_t key = 0;
    for (std::uint32_t c : row) {
        if (key > (UINT64_MAX - c) / base)
            throw ResourceLimitError("relation row key overflow");
        key = key * base + c;
    }
    return key;
}

bool Relation::insert(std::span<const std::uint32_t> row, std::uint32_t n_constants) {
    if (!packed_.insert(pack(row, n_constants)).second) return false;
    const auto idx = static_cast<std::uint32_t>(rows.size());
    rows.emplace_back(row.begin(), row.end());
    if (by_pos_.size() < row.size()) by_pos_.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) by_pos_[i][row[i]].push_back(idx);
    return true;
}

bool Relation::contains(std::span<const std::uint32_t> row, std::uint32_t n_constants) const {
    return packed_.count(pack(row, n_constants)) != 0;
}

std::span<const std::uint32_t> Relation::rows_with(unsigned pos, std::uint32_t c) const {
    if (pos >= by_pos_.size()) return {};
    auto it = by_pos_[pos].find(c);
    if (it == by_pos_[pos].end()) return {};
    return it->second;
}

bool Model::contains(const Atom& a) const {
    auto it = relations.find(a.pred);
    if (it == relations.end() || it->second.arity != a.arity()) return false;
    std::vector<std::uint32_t> row;
    row.reserve(a.args.size());
    for (const auto& t : a.args) {
        if (t.is_var()) return false;
        auto id = constants.try_id(t.name);
        if (!id) return false;
        row.push_back(*id);
    }
    return it->second.contains(row, constants.size());
}

std::size_t Model::fact_count() const {
    std::size_t n = 0;
    for (const auto& [_, rel] : relations) n += rel.rows.size();
    return n;
}

std::vector<std::string> harvest_constants(const Task& task) {
    std::set<std::string> pool;
    auto add_atom = [&pool](const Atom& a) {
        for (const auto& t : a.args)
            if (!t.is_var()) pool.insert(t.name);
    };
    for (const auto& a : task.background_facts) add_atom(a);
    for (const auto& r : task.background_rules) {
        add_atom(r.head);
        for (const auto& a : r.body) add_atom(a);
    }
    for (const auto& a : task.positives) add_atom(a);
    for (const auto& a : task.negatives) add_atom(a);
    return {pool.begin(), pool.end()};
}

RuleMatcher::RuleMatcher(const Rule& rule, const Model& model) : rule_(rule), model_(model) {
    check_head_safe(rule);
    n_constants_ = model.constants.size();

    std::uint32_t max_var = 0;
    bool any_var = false;
    for (std::uint32_t v : distinct_vars(rule)) {
        max_var = std::max(max_var, v);
        any_var = true;
    }
    bindings_.assign(any_var ? max_var + 1 : 0, kUnbound);
    done_.assign(rule.body.size(), false);
    id_scratch_.reserve(rule.head.args.size());

    head_.reserve(rule.head.args.size());
    for (const Term& t : rule.head.args) {
        if (t.is_var()) {
            head_.push_back(Arg{true, t.var});
        } else if (auto id = model.constants.try_id(t.name)) {
            head_.push_back(Arg{false, *id});
        } else {
            head_possible_ = false;
            head_.push_back(Arg{false, 0});
        }
    }

    body_.reserve(rule.body.size());
    for (const Atom& atom : rule.body) {
        Lit lit;
        auto it = model.relations.find(atom.pred);
        if (it != model.relations.end() && it->second.arity == atom.arity())
            lit.rel = &it->second;
        else
            lit.impossible = true;
        lit.args.reserve(atom.args.size());
        for (const Term& t : atom.args) {
            if (t.is_var()) {
                lit.args.push_back(Arg{true, t.var});
            } else if (auto id = model.constants.try_id(t.name)) {
                lit.args.push_back(Arg{false, *id});
            } else {
                lit.impossible = true;
                lit.args.push_back(Arg{false, 0});
            }
        }
        lit.fixed.assign(atom.args.size(), kUnbound);
        lit.bound.reserve(atom.args.size());
        body_.push_back(std::move(lit));
    }
}

void RuleMatcher::reset() { std::fill(bindings_.begin(), bindings_.end(), kUnbound); }

std::size_t RuleMatcher::select_literal() const {
    std::size_t best = SIZE_MAX;
    int best_score = -1;
    for (std::size_t i = 0; i < body_.size(); ++i) {
        if (done_[i]) continue;
        int score = 0;
        for (const Arg& a : body_[i].args)
            if (!a.is_var || bindings_[a.value] != kUnbound) ++score;
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

/// Sink is called at each complete solution and returns false to stop.
template <typename Sink>
bool RuleMatcher::enumerate(std::size_t remaining, Sink& sink) {
    if (remaining == 0) return sink();
    const std::size_t pick = select_literal();
    done_[pick] = true;
    const bool keep_going = match(body_[pick], remaining, sink);
    done_[pick] = false;
    return keep_going;
}

template <typename Sink>
bool RuleMatcher::match(Lit& lit, std::size_t remaining, Sink& sink) {
    if (lit.impossible) return true; // yields nothing
    const Relation& rel = *lit.rel;
    const std::size_t n = lit.args.size();

    bool all_fixed = true;
    for (std::size_t i = 0; i < n; ++i) {
        const Arg& a = lit.args[i];
        lit.fixed[i] = a.is_var ? bindings_[a.value] : a.value;
        if (lit.fixed[i] == kUnbound) all_fixed = false;
    }

    if (all_fixed) {
        if (!rel.contains(lit.fixed, n_constants_)) return true;
        return enumerate(remaining - 1, sink);
    }

    auto try_row = [&](const std::vector<std::uint32_t>& row) {
        lit.bound.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (lit.fixed[i] != kUnbound) {
                if (row[i] != lit.fixed[i]) {
                    for (std::uint32_t v : lit.bound) bindings_[v] = kUnbound;
                    return true; // mismatch, keep scanning
                }
            } else {
                std::uint32_t& slot = bindings_[lit.args[i].value];
                if (slot != kUnbound) {
                    if (slot != row[i]) {
                        for (std::uint32_t v : lit.bound) bindings_[v] = kUnbound;
                        return true;
                    }
                } else {
                    slot = row[i];
                    lit.bound.push_back(lit.args[i].value);
                }
            }
        }
        const bool keep_going = enumerate(remaining - 1, sink);
        for (std::uint32_t v : lit.bound) bindings_[v] = kUnbound;
        return keep_going;
    };

    // Scan the shortest index among bound positions, else the whole relation.
    std::span<const std::uint32_t> candidates;
    bool indexed = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (lit.fixed[i] == kUnbound) continue;
        const auto span = rel.rows_with(static_cast<unsigned>(i), lit.fixed[i]);
        if (!indexed || span.size() < candidates.size()) {
            candidates = span;
            indexed = true;
        }
    }
    if (indexed) {
        for (std::uint32_t idx : candidates)
            if (!try_row(rel.rows[idx])) return false;
        return true;
    }
    for (const auto& row : rel.rows)
        if (!try_row(row)) return false;
    return true;
}

bool RuleMatcher::covers_ids(std::span<const std::uint32_t> head_ids) {
    if (!head_possible_ || head_ids.size() != head_.size()) return false;
    reset();
    for (std::size_t i = 0; i < head_.size(); ++i) {
        const Arg& a = head_[i];
        if (a.is_var) {
            std::uint32_t& slot = bindings_[a.value];
            if (slot != kUnbound && slot != head_ids[i]) return false;
            slot = head_ids[i];
        } else if (a.value != head_ids[i]) {
            return false;
        }
    }
    bool found = false;
    auto sink = [&found]() {
        found = true;
        return false;
    };
    enumerate(body_.size(), sink);
    return found;
}

bool RuleMatcher::covers_atom(const Atom& ground_atom) {
    if (ground_atom.pred != rule_.head.pred || ground_atom.arity() != rule_.head.arity())
        return false;
    id_scratch_.clear();
    for (const Term& t : ground_atom.args) {
        if (t.is_var()) return false;
        auto id = model_.constants.try_id(t.name);
        if (!id) return false;
        id_scratch_.push_back(*id);
    }
    return covers_ids(id_scratch_);
}

std::vector<std::vector<std::uint32_t>> RuleMatcher::head_tuples() {
    if (!head_possible_)
        throw Error("unknown constant in rule head: " + to_string(rule_.head));
    reset();
    std::set<std::vector<std::uint32_t>> seen;
    std::vector<std::uint32_t> tuple(head_.size());
    auto sink = [&]() {
        for (std::size_t i = 0; i < head_.size(); ++i)
            tuple[i] = head_[i].is_var ? bindings_[head_[i].value] : head_[i].value;
        seen.insert(tuple);
        return true;
    };
    enumerate(body_.size(), sink);
    return {seen.begin(), seen.end()};
}

Model least_model(const Task& task, std::size_t max_derived) {
    Model m;
    m.constants = Interner(harvest_constants(task));

    auto relation_for = [&m](const std::string& pred, unsigned arity) -> Relation& {
        auto [it, inserted] = m.relations.try_emplace(pred);
        if (inserted) it->second.arity = arity;
        if (it->second.arity != arity)
            throw Error("predicate " + pred + " used with conflicting arities");
        return it->second;
    };

    for (const auto& a : task.background_facts) {
        if (!a.ground()) throw Error("non-ground background fact: " + to_string(a));
        std::vector<std::uint32_t> row;
        row.reserve(a.args.size());
        for (const auto& t : a.args) row.push_back(m.constants.id(t.name));
        relation_for(a.pred, a.arity()).insert(row, m.constants.size());
    }

    for (const auto& r : task.background_rules) check_head_safe(r);

    bool changed = !task.background_rules.empty();
    while (changed) {
        changed = false;
        for (const auto& r : task.background_rules) {
            // Matchers are rebuilt per pass: relations may have appeared.
            const auto derived = RuleMatcher(r, m).head_tuples();
            Relation& rel = relation_for(r.head.pred, r.head.arity());
            for (const auto& tuple : derived)
                if (rel.insert(tuple, m.constants.size())) changed = true;
        }
        if (m.fact_count() > max_derived)
            throw ResourceLimitError("least model exceeded the derived-fact ceiling");
    }
    return m;
}

bool covers(const Rule& rule, const Model& model, const Atom& ground_atom) {
    return RuleMatcher(rule, model).covers_atom(ground_atom);
}

std::vector<std::vector<std::uint32_t>> entailed_head_tuples(const Rule& rule,
                                                             const Model& model) {
    return RuleMatcher(rule, model).head_tuples();
}

std::vector<RuleStats> coverage_bitsets(const std::vector<Rule>& rules, const Task& task,
                                        const Model& model) {
    const std::size_t n = task.positives.size() + task.negatives.size();

    // Examples translated to constant ids once; nullopt if any constant is
    // unknown to the model (such atoms are never covered).
    std::vector<std::optional<std::vector<std::uint32_t>>> example_ids;
    example_ids.reserve(n);
    for (const auto* side : {&task.positives, &task.negatives}) {
        for (const auto& a : *side) {
            std::vector<std::uint32_t> ids;
            ids.reserve(a.args.size());
            bool ok = true;
            for (const auto& t : a.args) {
                auto id = model.constants.try_id(t.name);
                if (!id) {
                    ok = false;
                    break;
                }
                ids.push_back(*id);
            }
            if (ok)
                example_ids.emplace_back(std::move(ids));
            else
                example_ids.emplace_back(std::nullopt);
        }
    }

    std::vector<RuleStats> out;
    out.reserve(rules.size());
    for (const auto& rule : rules) {
        RuleStats stats;
        stats.example_cov = Bitset(n);
        stats.body_literals = static_cast<std::uint32_t>(rule.body_literals());

        RuleMatcher matcher(rule, model);
        std::size_t idx = 0;
        for (const auto* side : {&task.positives, &task.negatives}) {
            for (const auto& a : *side) {
                if (a.pred == rule.head.pred && a.arity() == rule.head.arity() &&
                    example_ids[idx] && matcher.covers_ids(*example_ids[idx]))
                    stats.example_cov.set(idx);
                ++idx;
            }
        }
        out.push_back(std::move(stats));
    }
    return out;
}

} // namespace mmlp::logic
