#include <cmath>
#include <vector>

#include "doctest.h"
#include "mmlp/io.hpp"
#include "mmlp/rng.hpp"
#include "mmlp/search.hpp"

using namespace mmlp;
using search::PLFunction;
using search::SurrogateObjective;

namespace {

/// Deterministic random coverage pool for subset-search tests.
struct FakePool {
    std::vector<Bitset> pos, neg;
    std::vector<std::uint32_t> lits;
};

FakePool make_pool(std::size_t n_rules, std::size_t P, std::size_t Nn, std::uint64_t seed) {
    FakePool pool;
    Rng rng(seed);
    for (std::size_t i = 0; i < n_rules; ++i) {
        Bitset p(P), n(Nn);
        for (std::size_t j = 0; j < P; ++j)
            if (rng.below(3) == 0) p.set(j);
        for (std::size_t j = 0; j < Nn; ++j)
            if (rng.below(4) == 0) n.set(j);
        pool.pos.push_back(std::move(p));
        pool.neg.push_back(std::move(n));
        pool.lits.push_back(1 + static_cast<std::uint32_t>(rng.below(3)));
    }
    return pool;
}

double brute_force_best(const FakePool& pool, const SurrogateObjective& obj) {
    const std::size_t n = pool.pos.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ull << i)) subset.push_back(i);
        if (subset.size() > obj.max_rules) continue;
        const auto c = search::subset_counts(pool.pos, pool.neg, pool.lits, subset);
        if (c.body_literals > obj.max_body_literals) continue;
        double w = 0;
        for (std::size_t i : subset) w += obj.rule_weight[i];
        best = std::min(best, obj.eval(c.tp, c.fp, c.body_literals, w));
    }
    return best;
}

} // namespace

TEST_CASE("piecewise-linear functions interpolate and clamp") {
    const PLFunction f({{0, 0}, {2, 4}, {4, 0}});
    CHECK(f.eval(0) == doctest::Approx(0));
    CHECK(f.eval(1) == doctest::Approx(2));
    CHECK(f.eval(2) == doctest::Approx(4));
    CHECK(f.eval(3) == doctest::Approx(2));
    CHECK(f.eval(-1) == doctest::Approx(0)); // clamped left
    CHECK(f.eval(9) == doctest::Approx(0));  // clamped right
    CHECK_FALSE(f.constant());

    CHECK(f.min_on(0, 4) == doctest::Approx(0));
    CHECK(f.min_on(1, 3) == doctest::Approx(2));
    CHECK(f.min_on(1.5, 2.5) == doctest::Approx(3)); // ends only, no breakpoint minimum
    CHECK(f.min_on(6, 9) == doctest::Approx(0));     // clamped window

    const PLFunction c = PLFunction::constant_fn(3.5);
    CHECK(c.constant());
    CHECK(c.eval(-100) == doctest::Approx(3.5));
    CHECK(c.min_on(0, 1) == doctest::Approx(3.5));
}

TEST_CASE("sampled approximations are exact for linear terms") {
    const auto linear = search::build_pl_approx(
        [](std::uint64_t x) { return 2.0 * static_cast<double>(x) + 1.0; }, 0, 8);
    for (std::uint64_t x = 0; x <= 8; ++x)
        CHECK(linear.eval(static_cast<double>(x)) == doctest::Approx(2.0 * x + 1.0));

    // a convex term is interpolated between sampled integers
    const auto square = search::build_pl_approx(
        [](std::uint64_t x) { return static_cast<double>(x * x); }, 0, 8);
    CHECK(square.breakpoints().size() == 5); // 0, 2, 4, 6, 8
    CHECK(square.eval(2) == doctest::Approx(4));
    CHECK(square.eval(3) == doctest::Approx(10)); // midpoint of 4 and 16

    // degenerate and tiny ranges
    const auto point = search::build_pl_approx(
        [](std::uint64_t x) { return static_cast<double>(x * x); }, 5, 5);
    CHECK(point.constant());
    CHECK(point.eval(123) == doctest::Approx(25));

    const auto tiny = search::build_pl_approx(
        [](std::uint64_t x) { return static_cast<double>(x * x); }, 0, 2);
    CHECK(tiny.eval(0) == doctest::Approx(0));
    CHECK(tiny.eval(1) == doctest::Approx(1)); // duplicates collapsed, all integers sampled
    CHECK(tiny.eval(2) == doctest::Approx(4));
}

TEST_CASE("subset union counts") {
    const auto pool = make_pool(6, 10, 8, 3);
    const auto none = search::subset_counts(pool.pos, pool.neg, pool.lits, {});
    CHECK(none.tp == 0);
    CHECK(none.fp == 0);
    CHECK(none.body_literals == 0);

    const std::vector<std::size_t> subset = {1, 4};
    const auto c = search::subset_counts(pool.pos, pool.neg, pool.lits, subset);
    Bitset p = pool.pos[1];
    p |= pool.pos[4];
    Bitset n = pool.neg[1];
    n |= pool.neg[4];
    CHECK(c.tp == p.count());
    CHECK(c.fp == n.count());
    CHECK(c.body_literals == pool.lits[1] + pool.lits[4]);
}

TEST_CASE("exhaustive subset search equals brute force") {
    const auto pool = make_pool(10, 12, 10, 11);

    SurrogateObjective obj;
    obj.base = 3.0;
    for (std::size_t i = 0; i < 10; ++i) obj.rule_weight.push_back(0.1 * (1 + i));
    obj.g_tp = search::build_pl_approx(
        [](std::uint64_t t) { return -1.5 * static_cast<double>(t); }, 0, 12);
    obj.g_fp = search::build_pl_approx(
        [](std::uint64_t f) { return 2.0 * static_cast<double>(f); }, 0, 10);
    obj.g_lits = search::build_pl_approx(
        [](std::uint64_t l) { return 0.25 * static_cast<double>(l); }, 0, 30);
    obj.max_rules = 4;
    obj.max_body_literals = 9;

    search::SearchBudget budget; // pool of 10 <= exhaustive threshold
    const auto result = search::optimize(pool.pos, pool.neg, pool.lits, obj, budget);
    CHECK(result.exhausted);
    REQUIRE(!result.candidates.empty());
    CHECK(result.scores.front() == doctest::Approx(brute_force_best(pool, obj)).epsilon(1e-9));

    // candidates come back best-first with consistent scores and constraints
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        const auto& s = result.candidates[i];
        CHECK(s.size() <= obj.max_rules);
        const auto c = search::subset_counts(pool.pos, pool.neg, pool.lits, s);
        CHECK(c.body_literals <= obj.max_body_literals);
        double w = 0;
        for (std::size_t r : s) w += obj.rule_weight[r];
        CHECK(result.scores[i] ==
              doctest::Approx(obj.eval(c.tp, c.fp, c.body_literals, w)).epsilon(1e-9));
        if (i > 0) CHECK(result.scores[i] >= result.scores[i - 1] - 1e-12);
    }

    // the empty subset is always on the candidate list
    bool has_empty = false;
    for (const auto& s : result.candidates) has_empty |= s.empty();
    CHECK(has_empty);

    // incumbent trace never worsens
    for (std::size_t i = 1; i < result.incumbent_trace.size(); ++i)
        CHECK(result.incumbent_trace[i] <= result.incumbent_trace[i - 1] + 1e-12);
}

TEST_CASE("node budgets truncate the search but keep a valid incumbent") {
    const auto pool = make_pool(24, 16, 12, 5);
    SurrogateObjective obj;
    obj.base = 0.0;
    obj.rule_weight.assign(24, 0.5);
    obj.g_tp = search::build_pl_approx(
        [](std::uint64_t t) { return -2.0 * static_cast<double>(t); }, 0, 16);
    obj.g_fp = search::build_pl_approx(
        [](std::uint64_t f) { return 3.0 * static_cast<double>(f); }, 0, 12);
    obj.g_lits = PLFunction::constant_fn(0.0);

    search::SearchBudget starved;
    starved.max_nodes = 50;
    const auto result = search::optimize(pool.pos, pool.neg, pool.lits, obj, starved);
    CHECK_FALSE(result.exhausted);
    CHECK(result.nodes <= 50);
    REQUIRE(!result.candidates.empty());

    // determinism under a fixed budget
    const auto again = search::optimize(pool.pos, pool.neg, pool.lits, obj, starved);
    CHECK(again.candidates == result.candidates);
    CHECK(again.nodes == result.nodes);

    // a bigger budget can only improve the incumbent
    search::SearchBudget generous;
    generous.max_nodes = 2'000'000;
    const auto full = search::optimize(pool.pos, pool.neg, pool.lits, obj, generous);
    CHECK(full.scores.front() <= result.scores.front() + 1e-12);

    // top_k bounds the returned candidates, plus the guaranteed empty subset
    const auto top3 = search::optimize(pool.pos, pool.neg, pool.lits, obj, generous, 3);
    CHECK(top3.candidates.size() <= 4);
    CHECK(std::count(top3.candidates.begin(), top3.candidates.end(),
                     std::vector<std::size_t>{}) == 1);
    CHECK(top3.scores.front() == doctest::Approx(full.scores.front()));
}

TEST_CASE("exact rescoring breaks ties by literals then text") {
    std::vector<logic::Program> candidates;
    candidates.push_back(logic::canonical_program({io::parse_rule_text("p(V0) :- q(V0,V1), r(V1).")}));
    candidates.push_back(logic::canonical_program({io::parse_rule_text("p(V0) :- r(V0).")}));
    candidates.push_back(logic::canonical_program({io::parse_rule_text("p(V0) :- q(V0,V0).")}));

    // all costs equal: fewest literals wins, then lexicographic text
    std::vector<double> costs;
    const auto tie = search::rescore_exact(
        candidates, [](const logic::Program&) { return 7.0; }, &costs);
    CHECK(candidates[tie] == candidates[2]); // "q" sorts before "r" at equal size
    CHECK(costs == std::vector<double>{7.0, 7.0, 7.0});

    // a strictly cheaper candidate wins regardless of size
    const auto cheap = search::rescore_exact(candidates, [&](const logic::Program& p) {
        return p == candidates[0] ? 1.0 : 2.0;
    });
    CHECK(cheap == 0);

    // sub-tolerance cost differences are still ties
    const auto nearly = search::rescore_exact(candidates, [&](const logic::Program& p) {
        return p == candidates[1] ? 5.0 + 2e-10 : 5.0;
    });
    CHECK(candidates[nearly] == candidates[2]);
}
