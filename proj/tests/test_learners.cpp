#include <cmath>

#include "doctest.h"
#include "mmlp/errors.hpp"
#include "mmlp/io.hpp"
#include "mmlp/learners.hpp"

using namespace mmlp;
using learners::CostKind;
using learners::LearnOptions;
using learners::PreparedTask;

namespace {

io::SyntheticTask make_zendo(std::uint64_t seed, unsigned train_pos = 8, unsigned train_neg = 8,
                             unsigned test_pos = 6, unsigned test_neg = 6) {
    io::SyntheticParams params;
    params.train_pos = train_pos;
    params.train_neg = train_neg;
    params.test_pos = test_pos;
    params.test_neg = test_neg;
    return io::gen_synthetic(io::SyntheticFamily::zendo_like, params, seed);
}

PreparedTask prepare(const logic::Task& task) {
    rulegen::GenConfig gen;
    return PreparedTask::build(task, gen, cost::BetaPrior::noiseless(),
                               herbrand::PriorMode::generality);
}

} // namespace

TEST_CASE("prepared tasks cache coverage, entailment, and syntax consistently") {
    const auto syn = make_zendo(4);
    const auto p = prepare(syn.train);

    REQUIRE(!p.pool.empty());
    const auto& task = p.task;
    for (std::size_t i = 0; i < p.pool.size(); ++i) {
        for (std::size_t j = 0; j < task.positives.size(); ++j)
            CHECK(p.pos_cov[i].test(j) == logic::covers(p.pool[i], p.model, task.positives[j]));
        for (std::size_t j = 0; j < task.negatives.size(); ++j)
            CHECK(p.neg_cov[i].test(j) == logic::covers(p.pool[i], p.model, task.negatives[j]));
        CHECK(p.target_cov[i] == herbrand::entailed_target_bitset(p.pool[i], p.hb, p.model));
        CHECK(p.syntax_bits[i] ==
              doctest::Approx(cost::rule_syntax_length(p.pool[i], p.pred_priors)));
        CHECK(p.body_lits[i] == p.pool[i].body_literals());
    }
}

TEST_CASE("subset bookkeeping matches first-principles recomputation") {
    const auto syn = make_zendo(9);
    const auto p = prepare(syn.train);
    const std::uint64_t P = p.task.positives.size();
    const std::uint64_t Nn = p.task.negatives.size();

    const auto empty = p.counts_for({});
    CHECK(empty.tp == 0);
    CHECK(empty.fp == 0);
    CHECK(empty.fn == P);
    CHECK(empty.tn == Nn);
    CHECK(p.entailed_size({}) == 0);
    CHECK(p.program_for({}).empty());
    CHECK(p.exact_cmdl({}) == P); // every positive is a miss

    const std::vector<std::size_t> subset = {0, p.pool.size() / 2, p.pool.size() - 1};
    const auto counts = p.counts_for(subset);
    std::uint64_t tp = 0, fp = 0;
    for (std::size_t j = 0; j < P; ++j) {
        bool covered = false;
        for (std::size_t i : subset) covered = covered || p.pos_cov[i].test(j);
        tp += covered;
    }
    for (std::size_t j = 0; j < Nn; ++j) {
        bool covered = false;
        for (std::size_t i : subset) covered = covered || p.neg_cov[i].test(j);
        fp += covered;
    }
    CHECK(counts.tp == tp);
    CHECK(counts.fp == fp);
    CHECK(counts.fn == P - tp);
    CHECK(counts.tn == Nn - fp);
    CHECK(counts.total() == P + Nn);

    const auto prog = p.program_for(subset);
    CHECK(prog.size() <= subset.size()); // canonicalization may merge renamings
    CHECK(p.entailed_size(subset) == herbrand::entailed_space_size(prog, p.hb, p.model));

    const auto ctx = p.context_for(subset);
    CHECK(ctx.e_plus + ctx.e_minus == p.hb.total_target_atoms);
    CHECK(p.exact_mml(subset) ==
          doctest::Approx(cost::mml_total(prog, counts, ctx).total).epsilon(1e-12));

    std::uint64_t size = 0;
    for (std::size_t i : subset) size += p.pool[i].total_literals();
    CHECK(p.exact_cmdl(subset) == cost::cmdl_cost(size, counts.fp, counts.fn));
}

TEST_CASE("example variants reuse the cached pool") {
    const auto syn = make_zendo(13);
    const auto base = prepare(syn.train);

    io::PerturbSpec spec;
    spec.sample_size = 8;
    spec.positive_proportion = 0.75;
    spec.seed = 21;
    const auto variant_task = io::rebalance(syn.train, spec);
    REQUIRE(variant_task.positives.size() == 6);
    REQUIRE(variant_task.negatives.size() == 2);

    const auto variant = base.with_examples(variant_task);
    const auto fresh = prepare(variant_task);
    REQUIRE(variant.pool.size() == fresh.pool.size());
    for (std::size_t i = 0; i < variant.pool.size(); ++i) {
        CHECK(variant.pool[i] == fresh.pool[i]);
        CHECK(variant.pos_cov[i] == fresh.pos_cov[i]);
        CHECK(variant.neg_cov[i] == fresh.neg_cov[i]);
    }

    // relabeling noise also maps onto the cached coverage
    io::PerturbSpec noisy;
    noisy.noise_fraction = 0.25;
    noisy.seed = 5;
    const auto flipped_task = io::inject_noise(syn.train, noisy);
    const auto flipped = base.with_examples(flipped_task);
    const auto flipped_fresh = prepare(flipped_task);
    for (std::size_t i = 0; i < flipped.pool.size(); ++i) {
        CHECK(flipped.pos_cov[i] == flipped_fresh.pos_cov[i]);
        CHECK(flipped.neg_cov[i] == flipped_fresh.neg_cov[i]);
    }

    // atoms outside the base example set are rejected
    logic::Task alien = variant_task;
    alien.positives.push_back(
        logic::Atom{syn.train.target.name, {logic::Term::make_const("nowhere")}});
    CHECK_THROWS_AS((void)base.with_examples(alien), InvalidArgumentError);
}

TEST_CASE("random search is deterministic and pairs both cost kinds on one stream") {
    const auto syn = make_zendo(2);
    const auto p = prepare(syn.train);

    LearnOptions options;
    options.gen.rng_seed = 77;
    options.gen.program_samples = 400;

    const auto mml_a = learners::random_learn(p, CostKind::mml, options);
    const auto mml_b = learners::random_learn(p, CostKind::mml, options);
    CHECK(mml_a.program == mml_b.program);
    CHECK(mml_a.exact_cost() == doctest::Approx(mml_b.exact_cost()).epsilon(1e-15));

    const auto cmdl = learners::random_learn(p, CostKind::cmdl, options);
    const auto paired = learners::random_learn_paired(p, options);
    CHECK(paired.first.program == mml_a.program);
    CHECK(paired.first.cost_kind == CostKind::mml);
    CHECK(paired.second.program == cmdl.program);
    CHECK(paired.second.cost_kind == CostKind::cmdl);

    CHECK(mml_a.exact_cost() == doctest::Approx(mml_a.breakdown.total));
    CHECK(cmdl.exact_cost() == doctest::Approx(static_cast<double>(cmdl.cmdl)));
    CHECK(mml_a.provenance.learner == "random");
    CHECK(mml_a.provenance.seed == 77);

    LearnOptions other = options;
    other.gen.rng_seed = 78;
    const auto shifted = learners::random_learn(p, CostKind::mml, other);
    CHECK(shifted.provenance.seed == 78);
    CHECK(std::isfinite(shifted.exact_cost()));
}

TEST_CASE("branch-and-bound learning recovers a clean hidden rule") {
    const auto syn = make_zendo(6, 40, 40, 20, 20);
    const auto p = prepare(syn.train);

    LearnOptions options;
    const auto mml = learners::approx_learn(p, CostKind::mml, options);
    CHECK(mml.counts.errors() == 0);
    CHECK(mml.provenance.learner == "approx");

    const auto cmdl = learners::approx_learn(p, CostKind::cmdl, options);
    CHECK(cmdl.counts.errors() == 0);

    // evaluation against the held-out examples uses the same model
    const auto metrics =
        learners::evaluate(mml, syn.test_positives, syn.test_negatives, p.model);
    CHECK(metrics.balanced_accuracy > 0.9);
    CHECK(metrics.counts.total() == syn.test_positives.size() + syn.test_negatives.size());
}

TEST_CASE("balanced accuracy handles one-sided test sets") {
    const auto syn = make_zendo(3);
    const auto p = prepare(syn.train);
    learners::LearnedHypothesis hyp;
    hyp.program.rules = {syn.hidden_rule};
    hyp.thetas = cost::ThetaPair{0.99, 0.99};

    const auto both = learners::evaluate(hyp, syn.test_positives, syn.test_negatives, p.model);
    const double tpr = static_cast<double>(both.counts.tp) / syn.test_positives.size();
    const double tnr = static_cast<double>(both.counts.tn) / syn.test_negatives.size();
    CHECK(both.balanced_accuracy == doctest::Approx(0.5 * (tpr + tnr)));
    CHECK(both.balanced_accuracy == doctest::Approx(1.0)); // labels came from this very rule

    const auto pos_only = learners::evaluate(hyp, syn.test_positives, {}, p.model);
    CHECK(pos_only.balanced_accuracy == doctest::Approx(0.5 * (1.0 + 1.0)));

    learners::LearnedHypothesis empty;
    empty.thetas = cost::ThetaPair{0.99, 0.99};
    const auto none = learners::evaluate(empty, syn.test_positives, {}, p.model);
    CHECK(none.balanced_accuracy == doctest::Approx(0.5)); // 0 TPR, vacuous TNR of 1
}
