#include "fedvar/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fedvar {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void open_or_throw(std::ofstream& out, const std::string& path, bool append) {
    out.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
}

}  // namespace

void write_trial_csv(const std::string& path, const RunMeta& meta,
                     const std::vector<TrajectoryRecord>& trials) {
    std::ofstream out;
    open_or_throw(out, path, false);
    out << kTrialCsvHeader << '\n';
    for (const auto& tr : trials) {
        for (const auto& r : tr.rounds) {
            out << meta.algorithm << ',' << fmt(meta.d) << ',' << fmt(meta.stepsize) << ','
                << meta.Q << ',' << meta.T << ',' << tr.seed << ',' << r.t << ',' << fmt(r.gap)
                << ',' << fmt(r.grad_norm_sq) << ',' << fmt(r.running_min_grad_norm_sq) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void append_aggregate_csv(const std::string& path, const RunMeta& meta,
                          const std::vector<AggregateRow>& rows, bool write_header) {
    std::ofstream out;
    open_or_throw(out, path, !write_header);
    if (write_header) out << kAggregateCsvHeader << '\n';
    for (const auto& r : rows) {
        out << meta.algorithm << ',' << fmt(meta.d) << ',' << fmt(meta.stepsize) << ',' << meta.Q
            << ',' << meta.T << ',' << r.t << ',' << fmt(r.mean_gap) << ',' << fmt(r.se_gap) << ','
            << fmt(r.mean_grad_norm_sq) << ',' << r.n_effective << '\n';
    }
    if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

void write_aggregate_csv(const std::string& path, const RunMeta& meta,
                         const std::vector<AggregateRow>& rows) {
    append_aggregate_csv(path, meta, rows, true);
}

std::vector<TrialCsvRow> read_trial_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv '" + path + "'");
    if (line != kTrialCsvHeader) throw std::runtime_error("unexpected header in '" + path + "'");
    std::vector<TrialCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        TrialCsvRow r;
        auto next = [&]() {
            if (!std::getline(ss, field, ',')) throw std::runtime_error("short csv row");
            return field;
        };
        r.algorithm = next();
        r.d = std::stod(next());
        r.stepsize = std::stod(next());
        r.Q = std::stoi(next());
        r.T = std::stoll(next());
        r.seed = std::stoull(next());
        r.t = std::stoll(next());
        r.gap = std::stod(next());
        r.grad_norm_sq = std::stod(next());
        r.running_min_grad_norm_sq = std::stod(next());
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace fedvar
