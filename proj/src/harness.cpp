#include "fedvar/harness.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fedvar/problems.hpp"

namespace fedvar {

namespace {

std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
    return absorb(mix64(base_seed), static_cast<std::uint64_t>(trial_index));
}

}  // namespace

TrajectoryRecord run_trial(const RunConfig& cfg, const FederatedProblem& problem,
                           int trial_index) {
    const int dim = problem.dimension();
    Point x0 = cfg.x0.empty() ? Point(dim, 0.0) : cfg.x0;
    if (static_cast<int>(x0.size()) != dim)
        throw std::invalid_argument("x0 dimension does not match the problem");

    const StepsizePolicy policy = build_stepsize_policy(cfg);
    const bool scaffold = cfg.algorithm == "scaffold";
    const Objective& f = problem.average();
    const double f_star = problem.f_star();
    const NoiseStream stream =
        NoiseStream(cfg.base_seed).at_trial(static_cast<std::uint64_t>(trial_index));

    TrajectoryRecord rec;
    rec.seed = trial_seed(cfg.base_seed, trial_index);

    FedAvgState fa = make_fedavg_state(x0);
    ScaffoldState sc = scaffold ? make_scaffold_state(x0, problem.n()) : ScaffoldState{};

    double running_min = std::numeric_limits<double>::infinity();
    Point grad(dim);
    auto observe = [&](std::int64_t t, const Point& x) {
        f.gradient(std::span<const double>(x), std::span<double>(grad));
        const double gns = norm_sq(std::span<const double>(grad));
        running_min = std::min(running_min, gns);
        const double gap = f.value(x) - f_star;
        if (t % cfg.record_every == 0 || t == cfg.T)
            rec.rounds.push_back({t, gap, gns, running_min});
        return gap;
    };

    double gap = observe(0, scaffold ? sc.x : fa.x);
    for (std::int64_t t = 0; t < cfg.T; ++t) {
        const double alpha = policy.alpha(t);
        try {
            if (scaffold)
                scaffold_round(sc, problem, alpha, cfg.eta_s, cfg.Q, stream);
            else
                fedavg_round(fa, problem, alpha, cfg.Q, stream);
        } catch (const DivergenceError& e) {
            rec.diverged = true;
            rec.diverged_at = e.round();
            break;
        }
        gap = observe(t + 1, scaffold ? sc.x : fa.x);
    }
    rec.final_gap = gap;
    return rec;
}

std::vector<TrajectoryRecord> run_trials_serial(const RunConfig& cfg,
                                                const FederatedProblem& problem) {
    std::vector<TrajectoryRecord> out(cfg.n_runs);
    for (int k = 0; k < cfg.n_runs; ++k) out[k] = run_trial(cfg, problem, k);
    return out;
}

std::vector<TrajectoryRecord> run_trials_parallel(const RunConfig& cfg,
                                                  const FederatedProblem& problem, int jobs) {
    std::vector<TrajectoryRecord> out(cfg.n_runs);
#ifdef _OPENMP
    const int nt = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int k = 0; k < cfg.n_runs; ++k) out[k] = run_trial(cfg, problem, k);
#else
    (void)jobs;
    for (int k = 0; k < cfg.n_runs; ++k) out[k] = run_trial(cfg, problem, k);
#endif
    return out;
}

std::vector<AggregateRow> aggregate_trials(const std::vector<TrajectoryRecord>& trials) {
    std::size_t n_rounds = 0;
    for (const auto& tr : trials)
        if (!tr.diverged) n_rounds = std::max(n_rounds, tr.rounds.size());
    if (n_rounds == 0) throw std::runtime_error("all trials diverged");

    std::vector<AggregateRow> rows;
    rows.reserve(n_rounds);
    for (std::size_t r = 0; r < n_rounds; ++r) {
        // Kahan-compensated sums in fixed trial order; permutation-invariant
        // up to the deterministic order used here.
        double sum_gap = 0.0, comp_gap = 0.0;
        double sum_gns = 0.0, comp_gns = 0.0;
        int count = 0;
        std::int64_t t = -1;
        for (const auto& tr : trials) {
            if (tr.diverged || r >= tr.rounds.size()) continue;
            const auto& row = tr.rounds[r];
            t = row.t;
            double y = row.gap - comp_gap;
            double s = sum_gap + y;
            comp_gap = (s - sum_gap) - y;
            sum_gap = s;
            y = row.grad_norm_sq - comp_gns;
            s = sum_gns + y;
            comp_gns = (s - sum_gns) - y;
            sum_gns = s;
            ++count;
        }
        if (count == 0) continue;
        const double mean_gap = sum_gap / count;
        double var = 0.0, comp_var = 0.0;
        for (const auto& tr : trials) {
            if (tr.diverged || r >= tr.rounds.size()) continue;
            const double dmean = tr.rounds[r].gap - mean_gap;
            const double y = dmean * dmean - comp_var;
            const double s = var + y;
            comp_var = (s - var) - y;
            var = s;
        }
        const double se = count > 1 ? std::sqrt(var / (count - 1)) / std::sqrt(count) : 0.0;
        rows.push_back({t, mean_gap, se, sum_gns / count, count});
    }
    return rows;
}

ExperimentResult run_experiment(const RunConfig& cfg, int jobs) {
    const FederatedProblem problem = build_problem(cfg.problem);
    ExperimentResult res;
    res.fingerprint = config_fingerprint(cfg);
    res.trials = jobs == 1 ? run_trials_serial(cfg, problem)
                           : run_trials_parallel(cfg, problem, jobs);
    for (const auto& tr : res.trials)
        if (tr.diverged) ++res.n_diverged;
    res.aggregate = aggregate_trials(res.trials);
    return res;
}

std::vector<Table2Row> reproduce_table2(const Table2Options& opts) {
    std::vector<Table2Row> rows;
    for (const double d : opts.d_values) {
        Table2Row row{};
        row.d = d;

        const FederatedProblem problem = make_quadratic_huber_pair(d);
        row.sigma_f_star = problem.f_star() - problem.mean_agent_f_inf();
        if (opts.with_bgd) {
            const BgdEstimate bgd = estimate_bgd(problem);
            row.zeta2_plus_psi2 = bgd.sum();
        }

        RunConfig cfg;
        cfg.problem.preset = "quadratic_huber_pair";
        cfg.problem.d = d;
        cfg.problem.n_agents = 2;
        cfg.algorithm = "fedavg";
        cfg.stepsize.kind = "manual";
        cfg.stepsize.alpha = opts.alpha;
        cfg.eta_s = 1.0;
        cfg.Q = opts.Q;
        cfg.T = opts.T;
        cfg.n_runs = opts.n_runs;
        cfg.x0 = {opts.x0};
        cfg.base_seed = opts.seed;
        cfg.record_every = std::max<std::int64_t>(1, opts.T / 100);

        auto mean_final_gap = [&](const ExperimentResult& r) {
            double s = 0.0;
            int c = 0;
            for (const auto& tr : r.trials) {
                if (tr.diverged) continue;
                s += tr.final_gap;
                ++c;
            }
            if (c == 0) throw std::runtime_error("all trials diverged");
            return s / c;
        };

        row.fedavg_gap = mean_final_gap(run_experiment(cfg, opts.jobs));
        cfg.algorithm = "scaffold";  // eta_a = alpha, eta_s = 1
        row.scaffold_gap = mean_final_gap(run_experiment(cfg, opts.jobs));
        rows.push_back(row);
    }
    return rows;
}

std::vector<Fig1Curve> reproduce_fig1(const Fig1Options& opts) {
    std::vector<Fig1Curve> curves;
    for (const std::string& alg : {std::string{"fedavg"}, std::string{"scaffold"}}) {
        for (const double step : opts.stepsizes) {
            RunConfig cfg;
            cfg.problem.preset = "softplus_suite";
            cfg.problem.n_agents = opts.n_agents;
            cfg.algorithm = alg;
            cfg.stepsize.kind = "manual";
            cfg.stepsize.alpha = step;
            cfg.eta_s = opts.eta_s;
            cfg.Q = opts.Q;
            cfg.T = opts.T;
            cfg.n_runs = opts.n_runs;
            cfg.x0 = {opts.x0};
            cfg.base_seed = opts.seed;
            cfg.record_every = opts.record_every;
            ExperimentResult res = run_experiment(cfg, opts.jobs);
            curves.push_back({alg, step, std::move(res.aggregate), res.n_diverged});
        }
    }
    return curves;
}

}  // namespace fedvar
