#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedvar/algorithms.hpp"
#include "fedvar/config.hpp"
#include "fedvar/heterogeneity.hpp"

namespace fedvar {

struct RecordedRound {
    std::int64_t t;
    double gap;           // f(x_t) - f*
    double grad_norm_sq;  // ||grad f(x_t)||^2
    double running_min_grad_norm_sq;
};

struct TrajectoryRecord {
    std::vector<RecordedRound> rounds;
    double final_gap = 0.0;
    bool diverged = false;
    std::int64_t diverged_at = -1;
    std::uint64_t seed = 0;  // per-trial substream key
};

struct AggregateRow {
    std::int64_t t;
    double mean_gap;
    double se_gap;
    double mean_grad_norm_sq;
    int n_effective;
};

struct ExperimentResult {
    std::vector<TrajectoryRecord> trials;
    std::vector<AggregateRow> aggregate;
    int n_diverged = 0;
    std::string fingerprint;
};

// One deterministic trial: metrics are exact analytic f and grad f at the
// recorded rounds (every record_every-th round plus 0 and T); the running
// minimum of ||grad f(x_t)||^2 is tracked every round. Divergence is recorded
// on the trajectory, not thrown.
TrajectoryRecord run_trial(const RunConfig& cfg, const FederatedProblem& problem, int trial_index);

// Serial reference loop over trials; the parallel path must match it
// bit-for-bit.
std::vector<TrajectoryRecord> run_trials_serial(const RunConfig& cfg,
                                                const FederatedProblem& problem);

// OpenMP over trials. Records land in trial order, so the output is
// byte-identical for any job count.
std::vector<TrajectoryRecord> run_trials_parallel(const RunConfig& cfg,
                                                  const FederatedProblem& problem, int jobs);

// jobs == 1 runs the serial reference; jobs == 0 uses all hardware threads.
// Aggregation excludes diverged trials (count reported) and uses compensated
// summation in fixed trial order, so means are independent of scheduling and
// trial permutation.
ExperimentResult run_experiment(const RunConfig& cfg, int jobs = 0);

std::vector<AggregateRow> aggregate_trials(const std::vector<TrajectoryRecord>& trials);

// ---- paper-protocol reproductions ------------------------------------------

struct Table2Row {
    double d;
    double zeta2_plus_psi2;
    double sigma_f_star;
    double fedavg_gap;
    double scaffold_gap;
};

struct Table2Options {
    std::vector<double> d_values{-100.0, -50.0, -20.0, -2.0};
    std::int64_t T = 4000;
    int Q = 17;
    double alpha = 0.00046;  // eta_a for scaffold, with eta_s = 1
    int n_runs = 100;
    double x0 = 0.0;
    std::uint64_t seed = 42;
    int jobs = 0;
    bool with_bgd = true;  // the BGD sweep dominates runtime for quick smokes
};

std::vector<Table2Row> reproduce_table2(const Table2Options& opts);

struct Fig1Curve {
    std::string algorithm;
    double stepsize;
    std::vector<AggregateRow> rounds;
    int n_diverged;
};

struct Fig1Options {
    std::vector<double> stepsizes{0.0005, 0.002, 0.008};
    std::int64_t T = 1000;
    int Q = 17;
    int n_agents = 16;
    int n_runs = 100;
    double x0 = 0.0;
    double eta_s = 1.0;
    std::uint64_t seed = 42;
    std::int64_t record_every = 10;
    int jobs = 0;
};

std::vector<Fig1Curve> reproduce_fig1(const Fig1Options& opts);

}  // namespace fedvar
