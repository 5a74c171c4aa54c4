#include "mmlp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <tuple>

#include "mmlp/errors.hpp"
#include "mmlp/io.hpp"
#include "mmlp/learners.hpp"

namespace mmlp::cli {

Grid grid_from_name(const std::string& name) {
    if (name == "overall") return Grid::overall;
    if (name == "balance") return Grid::balance;
    if (name == "efficiency") return Grid::efficiency;
    if (name == "priors") return Grid::priors;
    if (name == "noise") return Grid::noise;
    if (name == "approx-balance") return Grid::approx_balance;
    throw InvalidArgumentError("unknown experiment grid: " + name);
}

std::string to_string(Grid grid) {
    switch (grid) {
    case Grid::overall: return "overall";
    case Grid::balance: return "balance";
    case Grid::efficiency: return "efficiency";
    case Grid::priors: return "priors";
    case Grid::noise: return "noise";
    case Grid::approx_balance: return "approx-balance";
    }
    return "?";
}

std::vector<std::string> grid_names() {
    return {"overall", "balance", "efficiency", "priors", "noise", "approx-balance"};
}

namespace {

std::string fmt_knob(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_measure(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::pair<double, double> mean_stderr(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = xs.empty() ? 0.0 : sum / n;
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1) / n)};
}

double actual_proportion(const logic::Task& task) {
    const double total = static_cast<double>(task.positives.size() + task.negatives.size());
    return total == 0 ? 0.0 : static_cast<double>(task.positives.size()) / total;
}

struct CellContext {
    std::string task_name;
    const learners::PreparedTask* prepared = nullptr;
    const io::SyntheticTask* synth = nullptr;
    std::uint64_t seed = 0;
    double positive_proportion = 0.0;
    double noise_fraction = 0.0;
};

learners::LearnOptions make_options(std::uint64_t seed, const cost::BetaPrior& prior,
                                    herbrand::PriorMode mode) {
    learners::LearnOptions o;
    o.gen.rng_seed = seed;
    o.prior = prior;
    o.prior_mode = mode;
    return o;
}

RunRecord record_from(const CellContext& cell, const std::string& learner_label,
                      const learners::LearnedHypothesis& hyp) {
    const learners::EvalMetrics eval = learners::evaluate(
        hyp, cell.synth->test_positives, cell.synth->test_negatives, cell.prepared->model);
    RunRecord r;
    r.task = cell.task_name;
    r.learner = learner_label;
    r.cost_kind = learners::to_string(hyp.cost_kind);
    r.seed = cell.seed;
    r.training_size = cell.prepared->task.positives.size() + cell.prepared->task.negatives.size();
    r.positive_proportion = cell.positive_proportion;
    r.noise_fraction = cell.noise_fraction;
    r.balanced_accuracy = eval.balanced_accuracy;
    r.exact_cost = hyp.exact_cost();
    r.wall_seconds = hyp.provenance.wall_seconds;
    return r;
}

void push_random_paired(std::vector<RunRecord>& out, const CellContext& cell,
                        const learners::LearnOptions& opts) {
    auto [mml, cmdl] = learners::random_learn_paired(*cell.prepared, opts);
    out.push_back(record_from(cell, "random", mml));
    out.push_back(record_from(cell, "random", cmdl));
}

constexpr double kBalanceProps[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
constexpr std::uint64_t kBalanceSizes[] = {20, 50};
constexpr std::uint64_t kEfficiencySizes[] = {1, 5, 10, 20, 50, 100, 200, 500};
constexpr double kNoiseFractions[] = {0.1, 0.2, 0.3, 0.4, 0.5};
constexpr double kApproxProps[] = {1.0, 0.0};

} // namespace

std::vector<RunRecord> run_grid(Grid grid, const GridOptions& options) {
    std::vector<RunRecord> records;
    const cost::BetaPrior prior =
        grid == Grid::noise ? cost::BetaPrior::noisy() : cost::BetaPrior::noiseless();
    const bool big_base = grid == Grid::efficiency || grid == Grid::priors;

    const io::SyntheticFamily families[] = {io::SyntheticFamily::zendo_like,
                                            io::SyntheticFamily::trains};
    for (unsigned rep = 0; rep < options.reps; ++rep) {
        for (unsigned fam_idx = 0; fam_idx < 2; ++fam_idx) {
            io::SyntheticParams params;
            if (big_base) params.train_pos = params.train_neg = 300;
            const std::uint64_t task_seed =
                options.base_seed + 7919ull * rep + 104729ull * fam_idx + 1;
            const io::SyntheticTask synth =
                io::gen_synthetic(families[fam_idx], params, task_seed);
            const std::string task_name = synth.family + "/" + std::to_string(rep);

            rulegen::GenConfig gen;
            gen.rng_seed = task_seed;
            const learners::PreparedTask base = learners::PreparedTask::build(
                synth.train, gen, prior, herbrand::PriorMode::generality);

            unsigned cell_idx = 0;
            const auto cell_seed = [&]() { return task_seed + 31ull * (++cell_idx); };

            switch (grid) {
            case Grid::overall: {
                const std::uint64_t seed = cell_seed();
                const CellContext cell{task_name, &base,  &synth,
                                       seed,      actual_proportion(base.task), 0.0};
                const auto opts = make_options(seed, prior, herbrand::PriorMode::generality);
                push_random_paired(records, cell, opts);
                records.push_back(record_from(
                    cell, "approx", learners::approx_learn(base, learners::CostKind::mml, opts)));
                records.push_back(record_from(
                    cell, "approx", learners::approx_learn(base, learners::CostKind::cmdl, opts)));
                break;
            }
            case Grid::balance: {
                for (std::uint64_t size : kBalanceSizes) {
                    for (double prop : kBalanceProps) {
                        const std::uint64_t seed = cell_seed();
                        io::PerturbSpec spec;
                        spec.sample_size = size;
                        spec.positive_proportion = prop;
                        spec.seed = seed;
                        logic::Task variant;
                        try {
                            variant = io::rebalance(synth.train, spec);
                        } catch (const InvalidArgumentError&) {
                            continue;
                        }
                        const learners::PreparedTask prep = base.with_examples(variant);
                        const CellContext cell{task_name, &prep, &synth, seed, prop, 0.0};
                        push_random_paired(
                            records, cell,
                            make_options(seed, prior, herbrand::PriorMode::generality));
                    }
                }
                break;
            }
            case Grid::efficiency: {
                for (std::uint64_t size : kEfficiencySizes) {
                    const std::uint64_t seed = cell_seed();
                    io::PerturbSpec spec;
                    spec.sample_size = size;
                    spec.seed = seed;
                    logic::Task variant;
                    try {
                        variant = io::rebalance(synth.train, spec);
                    } catch (const InvalidArgumentError&) {
                        continue;
                    }
                    const learners::PreparedTask prep = base.with_examples(variant);
                    const CellContext cell{task_name, &prep,
                                           &synth,    seed,
                                           actual_proportion(variant), 0.0};
                    push_random_paired(records, cell,
                                       make_options(seed, prior,
                                                    herbrand::PriorMode::generality));
                }
                break;
            }
            case Grid::priors: {
                learners::PreparedTask uniform_base = base;
                uniform_base.pred_priors = herbrand::predicate_priors(
                    base.task, base.hb, herbrand::PriorMode::uniform);
                uniform_base.prior_mode = herbrand::PriorMode::uniform;
                for (std::uint64_t size : kEfficiencySizes) {
                    const std::uint64_t seed = cell_seed();
                    io::PerturbSpec spec;
                    spec.sample_size = size;
                    spec.seed = seed;
                    logic::Task variant;
                    try {
                        variant = io::rebalance(synth.train, spec);
                    } catch (const InvalidArgumentError&) {
                        continue;
                    }
                    const learners::PreparedTask prep_g = base.with_examples(variant);
                    const learners::PreparedTask prep_u = uniform_base.with_examples(variant);
                    const double prop = actual_proportion(variant);
                    const CellContext cell_g{task_name, &prep_g, &synth, seed, prop, 0.0};
                    const CellContext cell_u{task_name, &prep_u, &synth, seed, prop, 0.0};
                    records.push_back(record_from(
                        cell_g, "random_generality",
                        learners::random_learn(
                            prep_g, learners::CostKind::mml,
                            make_options(seed, prior, herbrand::PriorMode::generality))));
                    records.push_back(record_from(
                        cell_u, "random_uniform",
                        learners::random_learn(
                            prep_u, learners::CostKind::mml,
                            make_options(seed, prior, herbrand::PriorMode::uniform))));
                }
                break;
            }
            case Grid::noise: {
                for (double frac : kNoiseFractions) {
                    const std::uint64_t seed = cell_seed();
                    io::PerturbSpec spec;
                    spec.noise_fraction = frac;
                    spec.seed = seed;
                    const logic::Task variant = io::inject_noise(synth.train, spec);
                    const learners::PreparedTask prep = base.with_examples(variant);
                    const CellContext cell{task_name, &prep,
                                           &synth,    seed,
                                           actual_proportion(variant), frac};
                    push_random_paired(records, cell,
                                       make_options(seed, prior,
                                                    herbrand::PriorMode::generality));
                }
                break;
            }
            case Grid::approx_balance: {
                for (double prop : kApproxProps) {
                    const std::uint64_t seed = cell_seed();
                    io::PerturbSpec spec;
                    spec.sample_size = 20;
                    spec.positive_proportion = prop;
                    spec.seed = seed;
                    logic::Task variant;
                    try {
                        variant = io::rebalance(synth.train, spec);
                    } catch (const InvalidArgumentError&) {
                        continue;
                    }
                    const learners::PreparedTask prep = base.with_examples(variant);
                    const CellContext cell{task_name, &prep, &synth, seed, prop, 0.0};
                    const auto opts = make_options(seed, prior, herbrand::PriorMode::generality);
                    records.push_back(record_from(
                        cell, "approx",
                        learners::approx_learn(prep, learners::CostKind::mml, opts)));
                    records.push_back(record_from(
                        cell, "approx",
                        learners::approx_learn(prep, learners::CostKind::cmdl, opts)));
                }
                break;
            }
            }
        }
    }
    return records;
}

std::string render_csv(const std::vector<RunRecord>& records) {
    std::vector<RunRecord> rows = records;
    std::sort(rows.begin(), rows.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.task, a.learner, a.cost_kind, a.training_size, a.positive_proportion,
                        a.noise_fraction, a.seed) <
               std::tie(b.task, b.learner, b.cost_kind, b.training_size, b.positive_proportion,
                        b.noise_fraction, b.seed);
    });

    std::string out = "# schema: mmlp-experiments-v1\n";
    out += "task,learner,cost_kind,seed,training_size,positive_proportion,noise_fraction,"
           "balanced_accuracy,exact_cost,wall_seconds\n";
    for (const RunRecord& r : rows) {
        out += r.task + "," + r.learner + "," + r.cost_kind + "," + std::to_string(r.seed) + "," +
               std::to_string(r.training_size) + "," + fmt_knob(r.positive_proportion) + "," +
               fmt_knob(r.noise_fraction) + "," + fmt_measure(r.balanced_accuracy) + "," +
               fmt_measure(r.exact_cost) + "," + fmt_measure(r.wall_seconds) + "\n";
    }

    // Per-condition accuracy, pooled over replicates and families.
    using GroupKey = std::tuple<std::string, std::string, std::uint64_t, double, double>;
    std::map<GroupKey, std::vector<double>> groups;
    for (const RunRecord& r : rows)
        groups[{r.learner, r.cost_kind, r.training_size, r.positive_proportion,
                r.noise_fraction}]
            .push_back(r.balanced_accuracy);
    for (const auto& [key, accs] : groups) {
        const auto [mean, se] = mean_stderr(accs);
        out += "# mean learner=" + std::get<0>(key) + " cost=" + std::get<1>(key) +
               " size=" + std::to_string(std::get<2>(key)) + " prop=" +
               fmt_knob(std::get<3>(key)) + " noise=" + fmt_knob(std::get<4>(key)) +
               " n=" + std::to_string(accs.size()) + " balanced_accuracy=" + fmt_knob(mean) +
               " stderr=" + fmt_knob(se) + "\n";
    }

    // Paired deltas between cost kinds at matched (task, seed, condition).
    using PairKey = std::tuple<std::string, std::string, std::uint64_t, std::uint64_t, double,
                               double>;
    std::map<PairKey, std::pair<std::optional<double>, std::optional<double>>> pairs;
    for (const RunRecord& r : rows) {
        auto& slot = pairs[{r.task, r.learner, r.seed, r.training_size, r.positive_proportion,
                            r.noise_fraction}];
        if (r.cost_kind == "mml") slot.first = r.balanced_accuracy;
        if (r.cost_kind == "cmdl") slot.second = r.balanced_accuracy;
    }
    using DeltaKey = std::tuple<std::string, std::uint64_t, double, double>;
    std::map<DeltaKey, std::vector<double>> deltas;
    for (const auto& [key, pair] : pairs)
        if (pair.first && pair.second)
            deltas[{std::get<1>(key), std::get<3>(key), std::get<4>(key), std::get<5>(key)}]
                .push_back(*pair.first - *pair.second);
    for (const auto& [key, ds] : deltas) {
        const auto [mean, se] = mean_stderr(ds);
        out += "# paired_delta_mml_minus_cmdl learner=" + std::get<0>(key) +
               " size=" + std::to_string(std::get<1>(key)) + " prop=" +
               fmt_knob(std::get<2>(key)) + " noise=" + fmt_knob(std::get<3>(key)) +
               " n=" + std::to_string(ds.size()) + " delta=" + fmt_knob(mean) +
               " stderr=" + fmt_knob(se) + "\n";
    }

    // Paired deltas between predicate codebooks at matched (task, seed, size).
    using PriorPairKey = std::tuple<std::string, std::uint64_t, std::uint64_t>;
    std::map<PriorPairKey, std::pair<std::optional<double>, std::optional<double>>> prior_pairs;
    for (const RunRecord& r : rows) {
        if (r.learner != "random_generality" && r.learner != "random_uniform") continue;
        auto& slot = prior_pairs[{r.task, r.seed, r.training_size}];
        if (r.learner == "random_generality") slot.first = r.balanced_accuracy;
        else slot.second = r.balanced_accuracy;
    }
    std::map<std::uint64_t, std::vector<double>> prior_deltas;
    for (const auto& [key, pair] : prior_pairs)
        if (pair.first && pair.second)
            prior_deltas[std::get<2>(key)].push_back(*pair.first - *pair.second);
    for (const auto& [size, ds] : prior_deltas) {
        const auto [mean, se] = mean_stderr(ds);
        out += "# paired_delta_generality_minus_uniform size=" + std::to_string(size) +
               " n=" + std::to_string(ds.size()) + " delta=" + fmt_knob(mean) +
               " stderr=" + fmt_knob(se) + "\n";
    }
    return out;
}

} // namespace mmlp::cli
