#include <algorithm>

#include "doctest.h"
#include "mmlp/io.hpp"
#include "mmlp/logic.hpp"

using namespace mmlp;
using logic::Atom;
using logic::Bias;
using logic::PredSig;
using logic::Program;
using logic::Rule;
using logic::Term;

namespace {

Rule rule(const std::string& text) { return io::parse_rule_text(text); }

} // namespace

TEST_CASE("serialization of terms, atoms, rules, programs") {
    CHECK(logic::to_string(Term::make_var(3)) == "V3");
    CHECK(logic::to_string(Term::make_const("abc")) == "abc");
    const Atom a{"edge", {Term::make_const("n1"), Term::make_var(0)}};
    CHECK(logic::to_string(a) == "edge(n1,V0)");
    const Rule r = rule("p(V0) :- q(V0, V1), r(V1).");
    CHECK(logic::to_string(r) == "p(V0) :- q(V0,V1), r(V1).");
    Program prog = logic::canonical_program({r, rule("p(V0) :- q(V0, V0).")});
    CHECK(logic::to_string(prog) == "p(V0) :- q(V0,V0).\np(V0) :- q(V0,V1), r(V1).\n");
}

TEST_CASE("variable inventories") {
    const Rule r = rule("p(V0,V1) :- q(V1,V2), r(V2), q(V0,V0).");
    CHECK(logic::distinct_vars(r) == std::vector<std::uint32_t>{0, 1, 2});
    CHECK(logic::distinct_body_vars(r) == std::vector<std::uint32_t>{1, 2, 0});
    CHECK(logic::body_only_vars(r) == std::vector<std::uint32_t>{2});
    CHECK(logic::body_var_slots(r) == 5);

    const Rule ground = rule("p(a) :- q(a,b).");
    CHECK(logic::distinct_vars(ground).empty());
    CHECK(logic::body_var_slots(ground) == 2);
}

TEST_CASE("safety requires every head variable in the body") {
    CHECK(logic::is_safe(rule("p(V0) :- q(V0).")));
    CHECK(logic::is_safe(rule("p(a) :- q(V0).")));
    CHECK_FALSE(logic::is_safe(rule("p(V0) :- q(V1).")));
    CHECK_FALSE(logic::is_safe(rule("p(V0,V1) :- q(V0).")));
}

TEST_CASE("bias conformance") {
    Bias bias;
    bias.body_predicates = {{"q", 2}, {"r", 1}};
    bias.max_body_literals_per_rule = 2;
    bias.max_vars_per_rule = 3;
    const PredSig target{"p", 1};

    CHECK(logic::conforms_to_bias(rule("p(V0) :- q(V0,V1), r(V1)."), bias, target));
    // too many body literals
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- r(V0), q(V0,V1), q(V1,V2)."), bias, target));
    // too many distinct variables
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- q(V0,V1), q(V1,V2), r(V3)."),
                                        Bias{{{"q", 2}, {"r", 1}}, 3, 3, 5, 20}, target));
    // undeclared predicate
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- s(V0)."), bias, target));
    // wrong arity for a declared predicate
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- q(V0)."), bias, target));
    // recursion through the target is out of the hypothesis language
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- q(V0,V1), p(V1)."), bias, target));
    // wrong head predicate
    CHECK_FALSE(logic::conforms_to_bias(rule("z(V0) :- r(V0)."), bias, target));
    // unsafe
    CHECK_FALSE(logic::conforms_to_bias(rule("p(V0) :- r(V1)."), bias, target));
}

TEST_CASE("canonical rules are renaming-invariant") {
    const Rule a = rule("p(V4) :- q(V4,V9), r(V9).");
    const Rule b = rule("p(V0) :- r(V2), q(V0,V2).");
    CHECK(logic::canonical_rule(a) == logic::canonical_rule(b));
    CHECK(logic::to_string(logic::canonical_rule(a)) == "p(V0) :- q(V0,V1), r(V1).");

    // canonicalization is idempotent
    const Rule c = logic::canonical_rule(a);
    CHECK(logic::canonical_rule(c) == c);

    // body-only variables are relabelled to minimize the serialized form
    const Rule d = rule("p(V0) :- q(V0,V7), q(V0,V3), r(V3).");
    const Rule e = rule("p(V0) :- q(V0,V1), q(V0,V2), r(V1).");
    CHECK(logic::canonical_rule(d) == logic::canonical_rule(e));

    // duplicate body literals collapse under set semantics
    const Rule f = rule("p(V0) :- q(V0,V1), q(V0,V1).");
    CHECK(logic::canonical_rule(f).body_literals() == 1);
}

TEST_CASE("canonical programs dedup renamed rules and sort deterministically") {
    std::vector<Rule> rules = {
        rule("p(V0) :- q(V0,V5), r(V5)."),
        rule("p(V1) :- r(V0), q(V1,V0)."), // same rule, renamed
        rule("p(V0) :- r(V0)."),
    };
    const Program prog = logic::canonical_program(std::move(rules));
    REQUIRE(prog.size() == 2);
    // fewer literals first, then lexicographic text
    CHECK(logic::to_string(prog.rules[0]) == "p(V0) :- r(V0).");
    CHECK(logic::to_string(prog.rules[1]) == "p(V0) :- q(V0,V1), r(V1).");
    CHECK(prog.total_body_literals() == 3);
    CHECK(prog.total_literals() == 5);

    // input order never matters
    std::vector<Rule> reversed = {rule("p(V0) :- r(V0)."), rule("p(V0) :- q(V0,V1), r(V1).")};
    std::reverse(reversed.begin(), reversed.end());
    CHECK(logic::canonical_program(std::move(reversed)) == prog);
}
