#pragma once

// Seeded multi-trial experiment execution. One trial = one (optimizer, seed)
// pair run for run.steps updates against a shared immutable objective; trials
// fan out to a small thread pool and are collected in task order, so results
// and summaries are byte-deterministic no matter how many workers run or how
// they interleave.

#include <cstdint>
#include <string>
#include <vector>

#include "sgdf/config.hpp"
#include "sgdf/csv.hpp"
#include "sgdf/objectives.hpp"
#include "sgdf/vec.hpp"

namespace sgdf {

struct TrialResult {
    std::string optimizer_name;
    std::uint64_t seed = 0;
    bool failed = false;
    std::uint64_t failed_step = 0;  // first step that blew up (when failed)
    std::string failure_reason;
    std::vector<TrajectoryRecord> records;  // telemetry up to the failure point
    double final_loss = 0.0;  // f(theta_T); valid when !failed
    double best_loss = 0.0;   // min_t f(theta_t) over every step taken
    Vector theta_final;
};

struct OptimizerSummary {
    std::string name;
    std::size_t n_trials = 0;
    std::size_t n_failed = 0;
    // Across non-failed seeds; population statistics (0 for a single seed).
    double final_loss_mean = 0.0;
    double final_loss_std = 0.0;
    double best_loss_mean = 0.0;
    double best_loss_std = 0.0;
};

struct ExperimentResult {
    // Optimizer-major, seed-minor, both in config order.
    std::vector<TrialResult> trials;
    std::vector<OptimizerSummary> summaries;
};

// Runs every (optimizer, seed) trial. Each trial draws its gradient noise
// from RngStream(seed, 0), so all optimizers see the identical noise sequence
// for a given seed (paired comparisons). A trial that raises numeric_error is
// marked failed with its step index; the batch continues. jobs bounds the
// worker threads (0 = 1).
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t jobs = 1);

// Mean noise-free loss at each recorded step across an optimizer's non-failed
// trials, truncated to the length every such trial reached. Returns empty
// vectors when every trial failed. Used by the SVG emitter.
void mean_loss_curve(const ExperimentResult& result, const std::string& optimizer_name,
                     std::vector<double>& steps_out, std::vector<double>& loss_out);

// Summary table rows in the format written to summary.csv.
std::vector<std::vector<std::string>> summary_rows(const ExperimentResult& result);
extern const std::vector<std::string> kSummaryHeader;

}  // namespace sgdf
