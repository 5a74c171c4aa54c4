#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "mmlp/errors.hpp"
#include "mmlp/experiments.hpp"
#include "mmlp/io.hpp"
#include "mmlp/learners.hpp"
#include "mmlp/model.hpp"

namespace {

using namespace mmlp;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        io::write_file(out_path, text);
}

struct LearnArgs {
    std::string bk, exs, bias, test_exs, out;
    std::string cost = "mml";
    std::string learner = "approx";
    std::string priors = "generality";
    std::optional<double> alpha, beta;
    bool noisy = false;
    std::uint64_t seed = 0;
    double solver_time = 180.0;
    double timeout = 1000.0;
};

void run_learn(const LearnArgs& a) {
    const logic::Task task = io::parse_task(io::TaskFiles{a.bk, a.exs, a.bias});

    cost::BetaPrior prior = a.noisy ? cost::BetaPrior::noisy() : cost::BetaPrior::noiseless();
    if (a.alpha) prior.alpha = *a.alpha;
    if (a.beta) prior.beta = *a.beta;
    const herbrand::PriorMode mode = a.priors == "uniform" ? herbrand::PriorMode::uniform
                                                           : herbrand::PriorMode::generality;
    const learners::CostKind kind =
        a.cost == "cmdl" ? learners::CostKind::cmdl : learners::CostKind::mml;

    learners::LearnOptions opts;
    opts.gen.rng_seed = a.seed;
    opts.prior = prior;
    opts.prior_mode = mode;
    opts.budget.solver_time_per_call = a.solver_time;
    opts.budget.trial_timeout = a.timeout;

    const learners::PreparedTask prepared =
        learners::PreparedTask::build(task, opts.gen, prior, mode);
    const learners::LearnedHypothesis hyp = a.learner == "random"
                                                ? learners::random_learn(prepared, kind, opts)
                                                : learners::approx_learn(prepared, kind, opts);

    const learners::EvalMetrics train =
        learners::evaluate(hyp, task.positives, task.negatives, prepared.model);
    std::optional<learners::EvalMetrics> test;
    if (!a.test_exs.empty()) {
        const auto [pos, neg] = io::parse_examples_file(a.test_exs, task.target);
        test = learners::evaluate(hyp, pos, neg, prepared.model);
    }
    emit(io::serialize_report(io::Report::from(hyp, train, test, prior, a.priors)), a.out);
}

struct PredictArgs {
    std::string bk, bias, report, exs;
};

void run_predict(const PredictArgs& a) {
    const logic::Task task = io::parse_task_text(io::read_file(a.bk), "", io::read_file(a.bias));
    const io::Report report = io::parse_report(io::read_file(a.report));

    logic::Program program;
    for (const std::string& text : report.rules)
        program.rules.push_back(io::parse_rule_text(text));
    const logic::Model model = logic::least_model(task);
    const auto [pos, neg] = io::parse_examples_file(a.exs, task.target);

    cost::ConfusionCounts counts;
    std::string out;
    const auto classify = [&](const logic::Atom& atom, bool truth) {
        const auto [label, prob] = cost::predict(program, report.thetas, model, atom);
        if (truth)
            (label ? counts.tp : counts.fn) += 1;
        else
            (label ? counts.fp : counts.tn) += 1;
        char line[64];
        std::snprintf(line, sizeof line, " %.17g %s\n", prob, label ? "pos" : "neg");
        out += logic::to_string(atom) + line;
    };
    for (const logic::Atom& atom : pos) classify(atom, true);
    for (const logic::Atom& atom : neg) classify(atom, false);

    const double tpr = counts.positives() ? static_cast<double>(counts.tp) / counts.positives() : 1.0;
    const double tnr = counts.negatives() ? static_cast<double>(counts.tn) / counts.negatives() : 1.0;
    char summary[96];
    std::snprintf(summary, sizeof summary, "balanced_accuracy %.17g\n", (tpr + tnr) / 2.0);
    std::cout << out << summary;
}

struct GenArgs {
    std::string family = "trains";
    std::string out_dir;
    std::uint64_t seed = 0;
    io::SyntheticParams params;
};

void run_gen(const GenArgs& a) {
    io::SyntheticFamily family;
    if (a.family == "trains")
        family = io::SyntheticFamily::trains;
    else if (a.family == "zendo-like" || a.family == "zendo_like")
        family = io::SyntheticFamily::zendo_like;
    else
        throw InvalidArgumentError("unknown family: " + a.family);
    const io::SyntheticTask synth = io::gen_synthetic(family, a.params, a.seed);
    const io::TaskFiles files = io::write_task_files(synth, a.out_dir);
    std::cout << files.bk_path << "\n" << files.examples_path << "\n" << files.bias_path << "\n";
}

struct ExperimentArgs {
    std::string grid;
    std::string out;
    unsigned reps = 10;
    std::uint64_t seed = 0;
};

void run_experiment(const ExperimentArgs& a) {
    cli::GridOptions options;
    options.reps = a.reps;
    options.base_seed = a.seed;
    emit(cli::render_csv(cli::run_grid(cli::grid_from_name(a.grid), options)), a.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"probabilistic logic program learning by message-length minimization"};
    app.require_subcommand(1);

    LearnArgs learn_args;
    CLI::App* learn = app.add_subcommand("learn", "learn a program from a task");
    learn->add_option("--bk", learn_args.bk, "background knowledge file")->required();
    learn->add_option("--exs", learn_args.exs, "training examples file")->required();
    learn->add_option("--bias", learn_args.bias, "bias declarations file")->required();
    learn->add_option("--test-exs", learn_args.test_exs, "held-out examples file");
    learn->add_option("--cost", learn_args.cost, "cost function")
        ->check(CLI::IsMember({"mml", "cmdl"}));
    learn->add_option("--learner", learn_args.learner, "search strategy")
        ->check(CLI::IsMember({"random", "approx"}));
    learn->add_option("--alpha", learn_args.alpha, "Beta prior alpha");
    learn->add_option("--beta", learn_args.beta, "Beta prior beta");
    learn->add_flag("--noisy", learn_args.noisy, "use the label-noise prior Beta(5000,1)");
    learn->add_option("--seed", learn_args.seed, "random seed");
    learn->add_option("--solver-time", learn_args.solver_time, "seconds per optimizer call");
    learn->add_option("--timeout", learn_args.timeout, "seconds per learning trial");
    learn->add_option("--priors", learn_args.priors, "predicate codebook")
        ->check(CLI::IsMember({"generality", "uniform"}));
    learn->add_option("--out", learn_args.out, "report path (default stdout)");

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand("predict", "classify atoms with a learned report");
    predict->add_option("--bk", predict_args.bk, "background knowledge file")->required();
    predict->add_option("--bias", predict_args.bias, "bias declarations file")->required();
    predict->add_option("--report", predict_args.report, "report from learn")->required();
    predict->add_option("--exs", predict_args.exs, "labeled atoms to classify")->required();

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic task directory");
    gen->add_option("--family", gen_args.family, "trains or zendo-like");
    gen->add_option("--out-dir", gen_args.out_dir, "output directory")->required();
    gen->add_option("--seed", gen_args.seed, "generation seed");
    gen->add_option("--train-pos", gen_args.params.train_pos, "training positives");
    gen->add_option("--train-neg", gen_args.params.train_neg, "training negatives");
    gen->add_option("--test-pos", gen_args.params.test_pos, "held-out positives");
    gen->add_option("--test-neg", gen_args.params.test_neg, "held-out negatives");
    gen->add_option("--hidden-size", gen_args.params.hidden_body_literals,
                    "hidden rule body literals");

    ExperimentArgs exp_args;
    CLI::App* experiment = app.add_subcommand("experiment", "run an evaluation grid to CSV");
    experiment->add_option("grid", exp_args.grid, "grid name")
        ->required()
        ->check(CLI::IsMember(mmlp::cli::grid_names()));
    experiment->add_option("--reps", exp_args.reps, "replicates per cell");
    experiment->add_option("--seed", exp_args.seed, "base seed");
    experiment->add_option("--out", exp_args.out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
        if (learn->parsed()) run_learn(learn_args);
        if (predict->parsed()) run_predict(predict_args);
        if (gen->parsed()) run_gen(gen_args);
        if (experiment->parsed()) run_experiment(exp_args);
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const mmlp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mmlp::ResourceLimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
