#include "mmlp/logic.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "mmlp/errors.hpp"

namespace mmlp::logic {

bool Atom::ground() const {
    return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var(); });
}

std::size_t Program::total_body_literals() const {
    std::size_t n = 0;
    for (const auto& r : rules) n += r.body_literals();
    return n;
}

std::size_t Program::total_literals() const {
    return rules.size() + total_body_literals();
}

std::string to_string(const Term& t) {
    if (t.is_var()) return "V" + std::to_string(t.var);
    return t.name;
}

std::string to_string(const Atom& a) {
    if (a.args.empty()) return a.pred;
    std::string s = a.pred + "(";
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ",";
        s += to_string(a.args[i]);
    }
    s += ")";
    return s;
}

std::string to_string(const Rule& r) {
    std::string s = to_string(r.head);
    if (!r.body.empty()) {
        s += " :- ";
        for (std::size_t i = 0; i < r.body.size(); ++i) {
            if (i) s += ", ";
            s += to_string(r.body[i]);
        }
    }
    return s + ".";
}

std::string to_string(const Program& p) {
    std::string s;
    for (const auto& r : p.rules) {
        s += to_string(r);
        s += "\n";
    }
    return s;
}

namespace {

void collect_vars(const Atom& a, std::vector<std::uint32_t>& order, std::set<std::uint32_t>& seen) {
    for (const auto& t : a.args)
        if (t.is_var() && seen.insert(t.var).second) order.push_back(t.var);
}

} // namespace

std::vector<std::uint32_t> distinct_vars(const Rule& r) {
    std::vector<std::uint32_t> order;
    std::set<std::uint32_t> seen;
    collect_vars(r.head, order, seen);
    for (const auto& a : r.body) collect_vars(a, order, seen);
    return order;
}

std::vector<std::uint32_t> distinct_body_vars(const Rule& r) {
    std::vector<std::uint32_t> order;
    std::set<std::uint32_t> seen;
    for (const auto& a : r.body) collect_vars(a, order, seen);
    return order;
}

std::vector<std::uint32_t> body_only_vars(const Rule& r) {
    std::set<std::uint32_t> head_vars;
    for (const auto& t : r.head.args)
        if (t.is_var()) head_vars.insert(t.var);
    std::vector<std::uint32_t> out;
    for (std::uint32_t v : distinct_body_vars(r))
        if (!head_vars.count(v)) out.push_back(v);
    return out;
}

std::size_t body_var_slots(const Rule& r) {
    std::size_t n = 0;
    for (const auto& a : r.body) n += a.args.size();
    return n;
}

bool is_safe(const Rule& r) {
    std::set<std::uint32_t> body_vars;
    for (const auto& a : r.body)
        for (const auto& t : a.args)
            if (t.is_var()) body_vars.insert(t.var);
    for (const auto& t : r.head.args)
        if (t.is_var() && !body_vars.count(t.var)) return false;
    return true;
}

bool conforms_to_bias(const Rule& r, const Bias& bias, const PredSig& target) {
    if (r.head.pred != target.name || r.head.arity() != target.arity) return false;
    std::set<std::uint32_t> head_vars;
    for (const auto& t : r.head.args) {
        if (!t.is_var()) return false;
        if (!head_vars.insert(t.var).second) return false; // head vars pairwise distinct
    }
    if (r.body.size() > bias.max_body_literals_per_rule) return false;
    for (const auto& a : r.body) {
        if (a.pred == target.name) return false; // non-recursive
        bool declared = false;
        for (const auto& p : bias.body_predicates)
            if (p.name == a.pred && p.arity == a.arity()) declared = true;
        if (!declared) return false;
    }
    if (distinct_vars(r).size() > bias.max_vars_per_rule) return false;
    return is_safe(r);
}

namespace {

Atom rename_atom(const Atom& a, const std::unordered_map<std::uint32_t, std::uint32_t>& map) {
    Atom out;
    out.pred = a.pred;
    out.args.reserve(a.args.size());
    for (const auto& t : a.args) {
        if (t.is_var())
            out.args.push_back(Term::make_var(map.at(t.var)));
        else
            out.args.push_back(t);
    }
    return out;
}

} // namespace

Rule canonical_rule(const Rule& r) {
    std::unordered_map<std::uint32_t, std::uint32_t> head_map;
    for (const auto& t : r.head.args)
        if (t.is_var() && !head_map.count(t.var))
            head_map.emplace(t.var, static_cast<std::uint32_t>(head_map.size()));
    const auto base = static_cast<std::uint32_t>(head_map.size());

    std::vector<std::uint32_t> extra;
    for (std::uint32_t v : distinct_body_vars(r))
        if (!head_map.count(v)) extra.push_back(v);

    Rule best;
    best.head = rename_atom(r.head, head_map);

    if (extra.empty()) {
        best.body.reserve(r.body.size());
        for (const auto& a : r.body) best.body.push_back(rename_atom(a, head_map));
        std::sort(best.body.begin(), best.body.end());
        best.body.erase(std::unique(best.body.begin(), best.body.end()), best.body.end());
        return best;
    }
    if (extra.size() > 9)
        throw ResourceLimitError("too many body-only variables to canonicalize: " +
                                 std::to_string(extra.size()));

    std::vector<std::uint32_t> perm(extra.size());
    std::iota(perm.begin(), perm.end(), 0);
    bool first = true;
    do {
        auto map = head_map;
        for (std::size_t i = 0; i < extra.size(); ++i) map.emplace(extra[i], base + perm[i]);
        std::vector<Atom> body;
        body.reserve(r.body.size());
        for (const auto& a : r.body) body.push_back(rename_atom(a, map));
        std::sort(body.begin(), body.end());
        body.erase(std::unique(body.begin(), body.end()), body.end());
        if (first || body < best.body) {
            best.body = std::move(body);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Program canonical_program(std::vector<Rule> rules) {
    for (auto& r : rules) r = canonical_rule(r);
    std::sort(rules.begin(), rules.end(), [](const Rule& a, const Rule& b) {
        if (a.total_literals() != b.total_literals()) return a.total_literals() < b.total_literals();
        return to_string(a) < to_string(b);
    });
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    Program p;
    p.rules = std::move(rules);
    return p;
}

} // namespace mmlp::logic
