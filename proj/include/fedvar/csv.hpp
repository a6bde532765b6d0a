#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedvar/harness.hpp"

namespace fedvar {

// Fixed column layouts. Numbers are written with "%.17g" so a re-read
// reproduces every double bit-exactly.
inline constexpr const char* kTrialCsvHeader =
    "algorithm,d,stepsize,Q,T,seed,t,gap,grad_norm_sq,running_min_grad_norm_sq";
inline constexpr const char* kAggregateCsvHeader =
    "algorithm,d,stepsize,Q,T,t,mean_gap,se_gap,mean_grad_norm_sq,n_effective";

struct RunMeta {
    std::string algorithm;
    double d = 0.0;         // problem parameter where defined, 0 otherwise
    double stepsize = 0.0;  // round-0 effective stepsize
    int Q = 1;
    std::int64_t T = 1;
};

void write_trial_csv(const std::string& path, const RunMeta& meta,
                     const std::vector<TrajectoryRecord>& trials);

void write_aggregate_csv(const std::string& path, const RunMeta& meta,
                         const std::vector<AggregateRow>& rows);

// Appending variant used when several (algorithm, stepsize) curves share one
// file; writes the header only when starting the file.
void append_aggregate_csv(const std::string& path, const RunMeta& meta,
                          const std::vector<AggregateRow>& rows, bool write_header);

struct TrialCsvRow {
    std::string algorithm;
    double d;
    double stepsize;
    int Q;
    std::int64_t T;
    std::uint64_t seed;
    std::int64_t t;
    double gap;
    double grad_norm_sq;
    double running_min_grad_norm_sq;
};

std::vector<TrialCsvRow> read_trial_csv(const std::string& path);

}  // namespace fedvar
