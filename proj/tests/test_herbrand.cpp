#include "doctest.h"
#include "mmlp/errors.hpp"
#include "mmlp/herbrand.hpp"
#include "mmlp/io.hpp"
#include "mmlp/model.hpp"

using namespace mmlp;
using logic::Atom;
using logic::Term;

namespace {

logic::Task chain_task() {
    return io::parse_task_text("q(a,b).\nq(b,c).\nr(b).\n", "pos(p(a)).\nneg(p(c)).\n",
                               "head_pred(p,1).\nbody_pred(q,2).\nbody_pred(r,1).\n");
}

Atom atom1(const std::string& pred, const std::string& c) {
    return Atom{pred, {Term::make_const(c)}};
}

Atom atom2(const std::string& pred, const std::string& c1, const std::string& c2) {
    return Atom{pred, {Term::make_const(c1), Term::make_const(c2)}};
}

} // namespace

TEST_CASE("herbrand base counts and membership") {
    const auto task = chain_task();
    const auto hb = herbrand::build_herbrand_base(task);
    CHECK(hb.constants.size() == 3); // a, b, c
    CHECK(hb.per_predicate_counts.at("p") == 3);
    CHECK(hb.per_predicate_counts.at("q") == 9);
    CHECK(hb.per_predicate_counts.at("r") == 3);
    CHECK(hb.total_target_atoms == 3);
    CHECK(hb.total_atoms == 15);

    CHECK(hb.contains(atom1("p", "a")));
    CHECK(hb.contains(atom2("q", "c", "c"))); // membership, not truth
    CHECK_FALSE(hb.contains(atom1("p", "zzz")));
    CHECK_FALSE(hb.contains(atom1("q", "a"))); // wrong arity
    CHECK_FALSE(hb.contains(Atom{"p", {Term::make_var(0)}}));
    CHECK_FALSE(hb.contains(atom1("unknown", "a")));

    CHECK_THROWS_AS((void)herbrand::build_herbrand_base(task, 10), ResourceLimitError);
}

TEST_CASE("target atom indexing is a bijection with the first argument most significant") {
    const auto task = io::parse_task_text(
        "q(a,b).\n", "pos(t(a,b)).\nneg(t(b,a)).\n",
        "head_pred(t,2).\nbody_pred(q,2).\n");
    const auto hb = herbrand::build_herbrand_base(task);
    REQUIRE(hb.constants.size() == 2); // a, b
    CHECK(hb.total_target_atoms == 4);

    CHECK(hb.target_index(atom2("t", "a", "a")) == 0);
    CHECK(hb.target_index(atom2("t", "a", "b")) == 1);
    CHECK(hb.target_index(atom2("t", "b", "a")) == 2);
    CHECK(hb.target_index(atom2("t", "b", "b")) == 3);
    for (std::uint64_t i = 0; i < hb.total_target_atoms; ++i)
        CHECK(hb.target_index(hb.target_atom(i)) == i);

    CHECK_THROWS_AS((void)hb.target_atom(4), InvalidArgumentError);
    CHECK_THROWS_AS((void)hb.target_index(atom2("q", "a", "b")), InvalidArgumentError);
}

TEST_CASE("entailed target bitsets agree with hand-derived coverage") {
    const auto task = chain_task();
    const auto model = logic::least_model(task);
    const auto hb = herbrand::build_herbrand_base(task);
    // constants sort to a=0, b=1, c=2

    const auto join = io::parse_rule_text("p(V0) :- q(V0,V1), r(V1).");
    auto bits = herbrand::entailed_target_bitset(join, hb, model);
    CHECK(bits.count() == 1); // only q(a,b), r(b) closes the join
    CHECK(bits.test(0));

    const auto any_q = io::parse_rule_text("p(V0) :- q(V0,V1).");
    bits = herbrand::entailed_target_bitset(any_q, hb, model);
    CHECK(bits.count() == 2);
    CHECK(bits.test(0));
    CHECK(bits.test(1));

    const auto via_r = io::parse_rule_text("p(V0) :- r(V0).");
    bits = herbrand::entailed_target_bitset(via_r, hb, model);
    CHECK(bits.count() == 1);
    CHECK(bits.test(1));

    // second argument of the join, a body constant, and an impossible body
    const auto second = io::parse_rule_text("p(V1) :- q(V0,V1).");
    bits = herbrand::entailed_target_bitset(second, hb, model);
    CHECK(bits.count() == 2);
    CHECK(bits.test(1));
    CHECK(bits.test(2));

    const auto with_const = io::parse_rule_text("p(V0) :- q(V0,b).");
    bits = herbrand::entailed_target_bitset(with_const, hb, model);
    CHECK(bits.count() == 1);
    CHECK(bits.test(0));

    const auto impossible = io::parse_rule_text("p(V0) :- q(V0,V0).");
    CHECK(herbrand::entailed_target_bitset(impossible, hb, model).count() == 0);

    logic::Program prog;
    prog.rules = {any_q, via_r};
    CHECK(herbrand::entailed_space_size(prog, hb, model) == 2);
    CHECK(herbrand::entailed_space_size(logic::Program{}, hb, model) == 0);

    CHECK_THROWS_AS(
        (void)herbrand::entailed_target_bitset(io::parse_rule_text("z(V0) :- q(V0,V1)."), hb, model),
        InvalidArgumentError);
}

TEST_CASE("predicate priors over the declared body vocabulary") {
    const auto task = chain_task();
    const auto hb = herbrand::build_herbrand_base(task);

    const auto gen = herbrand::predicate_priors(task, hb, herbrand::PriorMode::generality);
    CHECK(gen.at("q") == doctest::Approx(0.75)); // 9 of 12 body atoms
    CHECK(gen.at("r") == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)gen.at("p"), InvalidArgumentError); // target carries no body prior

    const auto uni = herbrand::predicate_priors(task, hb, herbrand::PriorMode::uniform);
    CHECK(uni.at("q") == doctest::Approx(0.5));
    CHECK(uni.at("r") == doctest::Approx(0.5));
}

TEST_CASE("least model computes the fixpoint of background rules") {
    const auto task = io::parse_task_text(
        "edge(a,b).\nedge(b,c).\nedge(c,d).\n"
        "reach(V0,V1) :- edge(V0,V1).\n"
        "reach(V0,V2) :- reach(V0,V1), edge(V1,V2).\n",
        "pos(p(a)).\nneg(p(d)).\n",
        "head_pred(p,1).\nbody_pred(edge,2).\nbody_pred(reach,2).\n");
    const auto model = logic::least_model(task);
    CHECK(model.contains(atom2("reach", "a", "b")));
    CHECK(model.contains(atom2("reach", "a", "c")));
    CHECK(model.contains(atom2("reach", "a", "d"))); // needs three passes
    CHECK(model.contains(atom2("reach", "b", "d")));
    CHECK_FALSE(model.contains(atom2("reach", "b", "a")));
    CHECK_FALSE(model.contains(atom2("edge", "a", "c")));
    CHECK(model.fact_count() == 3 + 6);

    CHECK_THROWS_AS((void)logic::least_model(task, 4), ResourceLimitError);
}

TEST_CASE("rule coverage against a model") {
    const auto task = chain_task();
    const auto model = logic::least_model(task);

    const auto join = io::parse_rule_text("p(V0) :- q(V0,V1), r(V1).");
    CHECK(logic::covers(join, model, atom1("p", "a")));
    CHECK_FALSE(logic::covers(join, model, atom1("p", "b")));
    CHECK_FALSE(logic::covers(join, model, atom1("p", "zzz"))); // unknown constant
    CHECK_FALSE(logic::covers(join, model, atom1("z", "a")));   // different predicate

    // a head constant restricts coverage to that atom
    const auto fixed = io::parse_rule_text("p(a) :- r(V0).");
    CHECK(logic::covers(fixed, model, atom1("p", "a")));
    CHECK_FALSE(logic::covers(fixed, model, atom1("p", "b")));

    CHECK_THROWS_AS((void)logic::covers(io::parse_rule_text("p(V0) :- q(V1,V2)."), model,
                                        atom1("p", "a")),
                    UnsafeRuleError);

    // a matcher answers many queries without rebuilding
    logic::RuleMatcher matcher(join, model);
    CHECK(matcher.covers_atom(atom1("p", "a")));
    CHECK_FALSE(matcher.covers_atom(atom1("p", "c")));
    CHECK(matcher.covers_atom(atom1("p", "a"))); // stateless across calls
}
