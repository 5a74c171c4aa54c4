#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mmlp::cli {

/// One learner run on one perturbed training set, scored on held-out examples.
struct RunRecord {
    std::string task;      // family/replicate, e.g. "trains/3"
    std::string learner;   // random, approx, random_generality, random_uniform
    std::string cost_kind; // mml or cmdl
    std::uint64_t seed = 0;
    std::uint64_t training_size = 0;
    double positive_proportion = 0.0; // requested knob where applicable, else actual
    double noise_fraction = 0.0;
    double balanced_accuracy = 0.0;
    double exact_cost = 0.0;
    double wall_seconds = 0.0;
};

enum class Grid {
    overall,       // both learners x both costs on unperturbed tasks
    balance,       // class balance sweep, paired MML vs C-MDL random search
    efficiency,    // training-set size sweep, paired MML vs C-MDL random search
    priors,        // generality vs uniform predicate codebooks, MML random search
    noise,         // label noise sweep with the noise prior, paired random search
    approx_balance // class balance extremes under branch-and-bound search
};

Grid grid_from_name(const std::string& name);
std::string to_string(Grid grid);
std::vector<std::string> grid_names();

struct GridOptions {
    unsigned reps = 10;
    std::uint64_t base_seed = 0;
};

/// Runs every cell of the grid on freshly generated synthetic tasks.
/// Infeasible cells (e.g. a proportion the source set cannot supply) are
/// skipped rather than fatal.
std::vector<RunRecord> run_grid(Grid grid, const GridOptions& options);

/// Versioned CSV: schema comment, header, rows sorted by every column, then
/// per-group mean/stderr and paired-delta comment lines.
std::string render_csv(const std::vector<RunRecord>& records);

} // namespace mmlp::cli
