#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmlp/learners.hpp"
#include "mmlp/logic.hpp"

namespace mmlp::io {

struct TaskFiles {
    std::string bk_path;
    std::string examples_path;
    std::string bias_path;
};

logic::Task parse_task(const TaskFiles& files);
/// Same grammar, sources given inline (file names only label errors).
logic::Task parse_task_text(const std::string& bk, const std::string& examples,
                            const std::string& bias);

/// Parses a `pos(...)./neg(...).` example file against the task's target.
void parse_examples_text(const std::string& text, const std::string& source_name,
                         const logic::PredSig& target, std::vector<logic::Atom>& positives,
                         std::vector<logic::Atom>& negatives);
std::pair<std::vector<logic::Atom>, std::vector<logic::Atom>>
parse_examples_file(const std::string& path, const logic::PredSig& target);

/// Parses one rule written as `head :- b1, ..., bn.`
logic::Rule parse_rule_text(const std::string& text);

std::string serialize_bk(const logic::Task& task);
std::string serialize_examples(const std::vector<logic::Atom>& positives,
                               const std::vector<logic::Atom>& negatives);
std::string serialize_bias(const logic::Task& task);
std::string serialize_program(const logic::Program& program);

struct PerturbSpec {
    enum class NoiseMode { reassign, flip };
    double noise_fraction = 0.0;
    std::optional<std::uint64_t> sample_size;  // absent = keep all
    std::optional<double> positive_proportion; // absent = keep source proportions
    std::uint64_t seed = 0;
    NoiseMode noise_mode = NoiseMode::reassign;
};

/// Relabels floor(noise_fraction * N) distinct examples. In reassign mode each
/// selected example gets a fresh uniform label (about half keep their old
/// one); flip mode inverts instead.
logic::Task inject_noise(const logic::Task& task, const PerturbSpec& spec);

/// Uniform subsample to sample_size examples; with a proportion set, draws
/// floor(proportion * size) positives and the rest negatives.
logic::Task rebalance(const logic::Task& task, const PerturbSpec& spec);

enum class SyntheticFamily { trains, zendo_like };

struct SyntheticParams {
    unsigned train_pos = 60, train_neg = 60;
    unsigned test_pos = 30, test_neg = 30;
    unsigned hidden_body_literals = 2;
    // zendo_like: scene attribute marginals
    unsigned noise_attrs = 4;
    double hidden_attr_p = 0.52;
    double noise_attr_p = 0.70;
    // trains: car counts and car attribute marginals
    unsigned max_cars = 3;
    double short_p = 0.30;
    double attr_p = 0.50;
};

struct SyntheticTask {
    logic::Task train;
    std::vector<logic::Atom> test_positives;
    std::vector<logic::Atom> test_negatives;
    logic::Rule hidden_rule;
    std::string family;
    std::uint64_t seed = 0;
};

/// Generates a task whose labels are produced by a hidden bias-conforming
/// rule; background facts describe both training and test objects so test
/// atoms are predictable against the same model.
SyntheticTask gen_synthetic(SyntheticFamily family, const SyntheticParams& params,
                            std::uint64_t seed);

/// Writes bk.pl, exs.pl, bias.pl, test_exs.pl, manifest.json; byte-identical
/// for identical inputs. Returns the paths of the training task files.
TaskFiles write_task_files(const SyntheticTask& task, const std::string& directory);

/// Line-oriented learn report: deterministic for a fixed seed (no wall times).
struct Report {
    std::string learner, cost_kind, prior_mode;
    std::uint64_t seed = 0;
    double alpha = 0, beta = 0;
    cost::ConfusionCounts counts;
    cost::ThetaPair thetas;
    cost::CostBreakdown breakdown;
    std::uint64_t cmdl = 0;
    std::uint64_t e_plus = 0, e_minus = 0;
    double train_balanced_accuracy = 0.0;
    std::optional<double> test_balanced_accuracy;
    std::vector<std::string> rules; // canonical rule text

    static Report from(const learners::LearnedHypothesis& hyp,
                       const learners::EvalMetrics& train_metrics,
                       const std::optional<learners::EvalMetrics>& test_metrics,
                       const cost::BetaPrior& prior, const std::string& prior_mode);
};

std::string serialize_report(const Report& report);
Report parse_report(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace mmlp::io
