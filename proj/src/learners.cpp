#include "mmlp/learners.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "mmlp/errors.hpp"
#include "mmlp/numerics.hpp"
#include "mmlp/rng.hpp"

namespace mmlp::learners {

using logic::Atom;
using logic::Program;
using logic::Rule;

std::string to_string(CostKind kind) { return kind == CostKind::mml ? "mml" : "cmdl"; }

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

PreparedTask PreparedTask::build(const logic::Task& task, const rulegen::GenConfig& gen,
                                 const cost::BetaPrior& prior, herbrand::PriorMode mode) {
    PreparedTask p;
    p.task = task;
    p.model = logic::least_model(task);
    p.hb = herbrand::build_herbrand_base(task);
    p.pred_priors = herbrand::predicate_priors(task, p.hb, mode);
    p.prior = prior;
    p.prior_mode = mode;

    const unsigned max_size =
        std::min<unsigned>(gen.max_rule_size, task.bias.max_body_literals_per_rule);
    for (unsigned size = 1; size <= max_size; ++size) {
        auto rules = rulegen::enumerate_rules(task, gen, size);
        p.pool.insert(p.pool.end(), rules.begin(), rules.end());
    }

    const std::size_t n_pos = task.positives.size();
    auto stats = logic::coverage_bitsets(p.pool, task, p.model);
    p.pos_cov.reserve(p.pool.size());
    p.neg_cov.reserve(p.pool.size());
    p.target_cov.reserve(p.pool.size());
    p.syntax_bits.reserve(p.pool.size());
    p.body_lits.reserve(p.pool.size());
    for (std::size_t i = 0; i < p.pool.size(); ++i) {
        Bitset pos(n_pos), neg(task.negatives.size());
        for (std::size_t j = 0; j < n_pos; ++j)
            if (stats[i].example_cov.test(j)) pos.set(j);
        for (std::size_t j = 0; j < task.negatives.size(); ++j)
            if (stats[i].example_cov.test(n_pos + j)) neg.set(j);
        p.pos_cov.push_back(std::move(pos));
        p.neg_cov.push_back(std::move(neg));
        p.target_cov.push_back(herbrand::entailed_target_bitset(p.pool[i], p.hb, p.model));
        p.syntax_bits.push_back(cost::rule_syntax_length(p.pool[i], p.pred_priors));
        p.body_lits.push_back(stats[i].body_literals);
    }
    return p;
}

PreparedTask PreparedTask::with_examples(const logic::Task& variant) const {
    PreparedTask p = *this;
    p.task = variant;

    std::map<Atom, std::size_t> base_index;
    std::size_t idx = 0;
    for (const auto& a : task.positives) base_index.emplace(a, idx++);
    for (const auto& a : task.negatives) base_index.emplace(a, idx++);

    auto indices_of = [&](const std::vector<Atom>& atoms) {
        std::vector<std::size_t> out;
        out.reserve(atoms.size());
        for (const auto& a : atoms) {
            auto it = base_index.find(a);
            if (it == base_index.end())
                throw InvalidArgumentError("variant example is not part of the base task: " +
                                           logic::to_string(a));
            out.push_back(it->second);
        }
        return out;
    };
    const auto pos_idx = indices_of(variant.positives);
    const auto neg_idx = indices_of(variant.negatives);

    // Base coverage bitsets are positives-first over the base example order.
    std::vector<Bitset> base_cov;
    base_cov.reserve(pool.size());
    const std::size_t base_pos = task.positives.size();
    const std::size_t total = base_pos + task.negatives.size();
    for (std::size_t i = 0; i < pool.size(); ++i) {
        Bitset all(total);
        for (std::size_t j = 0; j < base_pos; ++j)
            if (pos_cov[i].test(j)) all.set(j);
        for (std::size_t j = 0; j < task.negatives.size(); ++j)
            if (neg_cov[i].test(j)) all.set(base_pos + j);
        base_cov.push_back(std::move(all));
    }
    for (std::size_t i = 0; i < pool.size(); ++i) {
        p.pos_cov[i] = base_cov[i].gather(pos_idx);
        p.neg_cov[i] = base_cov[i].gather(neg_idx);
    }
    return p;
}

cost::ConfusionCounts PreparedTask::counts_for(const std::vector<std::size_t>& subset) const {
    cost::ConfusionCounts c;
    const std::uint64_t P = task.positives.size();
    const std::uint64_t Nn = task.negatives.size();
    if (subset.empty()) {
        c.tp = 0;
        c.fp = 0;
    } else {
        Bitset pos = pos_cov[subset[0]];
        Bitset neg = neg_cov[subset[0]];
        for (std::size_t i = 1; i < subset.size(); ++i) {
            pos |= pos_cov[subset[i]];
            neg |= neg_cov[subset[i]];
        }
        c.tp = pos.count();
        c.fp = neg.count();
    }
    c.fn = P - c.tp;
    c.tn = Nn - c.fp;
    return c;
}

std::uint64_t PreparedTask::entailed_size(const std::vector<std::size_t>& subset) const {
    if (subset.empty()) return 0;
    Bitset u = target_cov[subset[0]];
    for (std::size_t i = 1; i < subset.size(); ++i) u |= target_cov[subset[i]];
    return u.count();
}

Program PreparedTask::program_for(const std::vector<std::size_t>& subset) const {
    std::vector<logic::Rule> rules;
    for (std::size_t i : subset) rules.push_back(pool[i]);
    return logic::canonical_program(std::move(rules));
}

cost::CostContext PreparedTask::context_for(const std::vector<std::size_t>& subset) const {
    cost::CostContext ctx;
    ctx.pred_priors = pred_priors;
    ctx.prior = prior;
    ctx.e_plus = entailed_size(subset);
    ctx.e_minus = hb.total_target_atoms - ctx.e_plus;
    ctx.max_total_literals = task.bias.max_total_literals;
    return ctx;
}

double PreparedTask::exact_mml(const std::vector<std::size_t>& subset,
                               cost::CostBreakdown* out) const {
    const auto breakdown =
        cost::mml_total(program_for(subset), counts_for(subset), context_for(subset));
    if (out) *out = breakdown;
    return breakdown.total;
}

std::uint64_t PreparedTask::exact_cmdl(const std::vector<std::size_t>& subset) const {
    const auto c = counts_for(subset);
    std::uint64_t size = 0;
    for (std::size_t i : subset) size += pool[i].total_literals();
    return cost::cmdl_cost(size, c.fp, c.fn);
}

namespace {

struct Scored {
    std::vector<std::size_t> subset;
    double cost = 0.0;
    std::size_t literals = 0;
    std::string text;
};

/// Returns true when `a` should replace `b` as the best hypothesis: smaller
/// cost, then fewer literals, then the smaller canonical serialization.
bool beats(const Scored& a, const Scored& b) {
    if (std::abs(a.cost - b.cost) > 1e-9) return a.cost < b.cost;
    if (a.literals != b.literals) return a.literals < b.literals;
    return a.text < b.text;
}

Scored score_subset(const PreparedTask& prepared, const std::vector<std::size_t>& subset,
                    CostKind kind) {
    Scored s;
    s.subset = subset;
    const Program prog = prepared.program_for(subset);
    s.literals = prog.total_literals();
    s.text = logic::to_string(prog);
    std::uint64_t body_total = 0;
    for (std::size_t i : subset) body_total += prepared.body_lits[i];
    if (body_total > prepared.task.bias.max_total_literals ||
        subset.size() > prepared.task.bias.max_rules) {
        s.cost = std::numeric_limits<double>::infinity();
        return s;
    }
    s.cost = kind == CostKind::mml ? prepared.exact_mml(subset)
                                   : static_cast<double>(prepared.exact_cmdl(subset));
    return s;
}

LearnedHypothesis finalize(const PreparedTask& prepared, const std::vector<std::size_t>& subset,
                           CostKind kind, const std::string& learner, std::uint64_t seed,
                           double wall_seconds) {
    LearnedHypothesis h;
    h.program = prepared.program_for(subset);
    h.counts = prepared.counts_for(subset);
    h.thetas = cost::fit_thetas(h.counts, prepared.prior);
    h.cost_kind = kind;
    const auto ctx = prepared.context_for(subset);
    h.e_plus = ctx.e_plus;
    h.e_minus = ctx.e_minus;
    h.breakdown = cost::mml_total(h.program, h.counts, ctx);
    std::uint64_t size = 0;
    for (std::size_t i : subset) size += prepared.pool[i].total_literals();
    h.cmdl = cost::cmdl_cost(size, h.counts.fp, h.counts.fn);
    h.provenance = Provenance{learner, seed, wall_seconds};
    return h;
}

/// Draws the candidate stream once and keeps the per-kind argmin.
std::vector<std::vector<std::size_t>> best_random_subsets(const PreparedTask& prepared,
                                                          const LearnOptions& options,
                                                          const std::vector<CostKind>& kinds) {
    Rng rng(options.gen.rng_seed);
    std::vector<Scored> best;
    for (CostKind kind : kinds) best.push_back(score_subset(prepared, {}, kind));

    if (!prepared.pool.empty()) {
        const std::uint64_t c_max =
            std::min<std::uint64_t>(options.gen.max_clauses, prepared.pool.size());
        for (std::uint64_t t = 0; t < options.gen.program_samples; ++t) {
            const std::uint64_t c = 1 + rng.below(std::max<std::uint64_t>(c_max, 1));
            auto subset = rng.sample_indices(prepared.pool.size(), c);
            std::sort(subset.begin(), subset.end());
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                Scored s = score_subset(prepared, subset, kinds[k]);
                if (beats(s, best[k])) best[k] = std::move(s);
            }
        }
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& s : best) out.push_back(std::move(s.subset));
    return out;
}

} // namespace

LearnedHypothesis random_learn(const PreparedTask& prepared, CostKind kind,
                               const LearnOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    auto winners = best_random_subsets(prepared, options, {kind});
    return finalize(prepared, winners[0], kind, "random", options.gen.rng_seed,
                    seconds_since(start));
}

std::pair<LearnedHypothesis, LearnedHypothesis> random_learn_paired(const PreparedTask& prepared,
                                                                    const LearnOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    auto winners = best_random_subsets(prepared, options, {CostKind::mml, CostKind::cmdl});
    const double wall = seconds_since(start);
    return {finalize(prepared, winners[0], CostKind::mml, "random", options.gen.rng_seed, wall),
            finalize(prepared, winners[1], CostKind::cmdl, "random", options.gen.rng_seed, wall)};
}

namespace {

/// Builds the separable piecewise-linear surrogate for the nonlinear part of
/// the MML total. Each count's term averages two conditional slices: one
/// anchored at the empty program, one at the all-rules program.
search::SurrogateObjective build_mml_surrogate(const PreparedTask& prepared,
                                               const std::vector<std::size_t>& kept) {
    const std::uint64_t P = prepared.task.positives.size();
    const std::uint64_t Nn = prepared.task.negatives.size();
    const std::uint64_t N = P + Nn;
    const std::uint64_t hb_total = prepared.hb.total_target_atoms;
    const double r = prepared.prior.error_rate();
    const std::uint64_t M = prepared.task.bias.max_total_literals;

    std::vector<std::size_t> all = kept;
    const auto full_counts = prepared.counts_for(all);
    const std::uint64_t e_full = prepared.entailed_size(all);
    std::uint64_t l_full = 0;
    for (std::size_t i : kept) l_full += prepared.body_lits[i];
    l_full = std::min<std::uint64_t>(l_full, M);

    // Nonlinear remainder at hypothetical counts. The entailed-space size is
    // counterfactual on a slice, so it is projected into the feasible window
    // [covered, hb_total - N + covered] to keep every breakpoint finite.
    auto remainder = [&, r](std::uint64_t tp, std::uint64_t fp, std::uint64_t lits,
                            std::uint64_t e_plus_hint) {
        cost::ConfusionCounts c;
        c.tp = tp;
        c.fp = fp;
        c.fn = P - tp;
        c.tn = Nn - fp;
        const std::uint64_t k = c.covered();
        const std::uint64_t e_plus = std::min(std::max(e_plus_hint, k), hb_total - N + k);
        const auto thetas = cost::fit_thetas(c, prepared.prior);
        return cost::log2_partition(lits) +
               cost::theta_length(c.tp, c.fp, prepared.prior) +
               cost::theta_length(c.tn, c.fn, prepared.prior) +
               cost::group_size_length(k, P, Nn, r) +
               cost::literals_length(c, e_plus, hb_total - e_plus) +
               cost::truth_length(c, thetas);
    };

    search::SurrogateObjective obj;
    obj.g_tp = search::build_pl_approx(
        [&](std::uint64_t t) {
            return 0.5 * (remainder(t, 0, 0, 0) +
                          remainder(t, full_counts.fp, l_full, e_full));
        },
        0, P);
    obj.g_fp = search::build_pl_approx(
        [&](std::uint64_t f) {
            return 0.5 * (remainder(0, f, 0, 0) +
                          remainder(full_counts.tp, f, l_full, e_full));
        },
        0, Nn);
    obj.g_lits = search::build_pl_approx(
        [&](std::uint64_t l) {
            return 0.5 * (remainder(0, 0, l, 0) +
                          remainder(full_counts.tp, full_counts.fp, l, e_full));
        },
        0, M);
    obj.base = -(remainder(0, 0, 0, 0) +
                 remainder(full_counts.tp, full_counts.fp, l_full, e_full));
    return obj;
}

search::SurrogateObjective build_cmdl_objective(const PreparedTask& prepared,
                                                std::size_t n_rules) {
    const std::uint64_t P = prepared.task.positives.size();
    const std::uint64_t Nn = prepared.task.negatives.size();
    search::SurrogateObjective obj;
    obj.base = static_cast<double>(P);
    obj.rule_weight.assign(n_rules, 0.0);
    obj.g_tp = search::build_pl_approx(
        [](std::uint64_t t) { return -static_cast<double>(t); }, 0, P);
    obj.g_fp = search::build_pl_approx(
        [](std::uint64_t f) { return static_cast<double>(f); }, 0, Nn);
    obj.g_lits = search::PLFunction::constant_fn(0.0);
    return obj;
}

} // namespace

LearnedHypothesis approx_learn(const PreparedTask& prepared, CostKind kind,
                               const LearnOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t Nn = prepared.task.negatives.size();

    // Stage: prune generalisations of over-tolerance rules. Skipped when the
    // pool is small enough for exhaustive search, which then covers the whole
    // subset lattice exactly.
    std::vector<std::size_t> kept;
    if (prepared.pool.size() <= options.budget.exhaustive_threshold) {
        kept.resize(prepared.pool.size());
        for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = i;
    } else {
        kept = rulegen::prune_generalisations(prepared.neg_cov, Nn, prepared.prior.error_rate());
    }

    std::vector<Bitset> pos, neg;
    std::vector<std::uint32_t> lits;
    for (std::size_t i : kept) {
        pos.push_back(prepared.pos_cov[i]);
        neg.push_back(prepared.neg_cov[i]);
        lits.push_back(prepared.body_lits[i]);
    }

    search::SurrogateObjective obj;
    if (kind == CostKind::mml) {
        obj = build_mml_surrogate(prepared, kept);
        obj.rule_weight.clear();
        for (std::size_t i : kept) obj.rule_weight.push_back(prepared.syntax_bits[i]);
    } else {
        obj = build_cmdl_objective(prepared, kept.size());
        for (std::size_t j = 0; j < kept.size(); ++j)
            obj.rule_weight[j] = static_cast<double>(prepared.pool[kept[j]].total_literals());
    }
    obj.max_rules = prepared.task.bias.max_rules;
    obj.max_body_literals = prepared.task.bias.max_total_literals;

    search::SearchBudget budget = options.budget;
    budget.solver_time_per_call = std::max(
        1.0, std::min(budget.solver_time_per_call, budget.trial_timeout - seconds_since(start)));
    const auto result = search::optimize(pos, neg, lits, obj, budget);

    // Re-score exactly: the solver's top candidates plus the empty program and
    // every surviving single rule, so surrogate error cannot hide a winner.
    std::set<std::vector<std::size_t>> subsets;
    for (const auto& cand : result.candidates) {
        std::vector<std::size_t> mapped;
        mapped.reserve(cand.size());
        for (std::size_t j : cand) mapped.push_back(kept[j]);
        std::sort(mapped.begin(), mapped.end());
        subsets.insert(std::move(mapped));
    }
    subsets.insert({});
    for (std::size_t i : kept) subsets.insert({i});

    std::vector<std::vector<std::size_t>> candidates(subsets.begin(), subsets.end());
    std::vector<Program> programs;
    programs.reserve(candidates.size());
    std::map<std::string, double> cost_by_text;
    for (const auto& s : candidates) {
        Program prog = prepared.program_for(s);
        const double c = kind == CostKind::mml ? prepared.exact_mml(s)
                                               : static_cast<double>(prepared.exact_cmdl(s));
        cost_by_text.emplace(logic::to_string(prog), c);
        programs.push_back(std::move(prog));
    }
    const std::size_t best = search::rescore_exact(
        programs, [&](const Program& p) { return cost_by_text.at(logic::to_string(p)); });

    return finalize(prepared, candidates[best], kind, "approx", options.gen.rng_seed,
                    seconds_since(start));
}

EvalMetrics evaluate(const LearnedHypothesis& hypothesis,
                     const std::vector<Atom>& test_positives,
                     const std::vector<Atom>& test_negatives, const logic::Model& model) {
    EvalMetrics m;
    for (const auto& a : test_positives) {
        const auto [label, prob] = cost::predict(hypothesis.program, hypothesis.thetas, model, a);
        (void)prob;
        if (label)
            ++m.counts.tp;
        else
            ++m.counts.fn;
    }
    for (const auto& a : test_negatives) {
        const auto [label, prob] = cost::predict(hypothesis.program, hypothesis.thetas, model, a);
        (void)prob;
        if (label)
            ++m.counts.fp;
        else
            ++m.counts.tn;
    }
    const double tpr = test_positives.empty()
                           ? 1.0
                           : static_cast<double>(m.counts.tp) / test_positives.size();
    const double tnr = test_negatives.empty()
                           ? 1.0
                           : static_cast<double>(m.counts.tn) / test_negatives.size();
    m.balanced_accuracy = 0.5 * (tpr + tnr);
    return m;
}

} // namespace mmlp::learners
