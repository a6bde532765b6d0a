// fedvar: verification, measurement, and reproduction workflows for the
// federated stochastic optimization library. Batch-only; diagnostics go to
// stderr, data to stdout and files. Exit codes: 0 success, 1 failed check or
// experiment, 2 usage/config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fedvar/csv.hpp"
#include "fedvar/harness.hpp"
#include "fedvar/problems.hpp"

using namespace fedvar;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("FEDVAR_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

void print_header(const std::string& cmd, std::uint64_t seed, const std::string& extra = {}) {
    std::cerr << "fedvar " << cmd << ": seed=" << seed;
    if (!extra.empty()) std::cerr << " " << extra;
    std::cerr << "\n";
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    return j;
}

double meta_d(const ProblemSpec& spec) {
    return spec.preset.rfind("quadratic_huber_pair", 0) == 0 ? spec.d : 0.0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::optional<std::uint64_t>& seed_flag, int jobs) {
    RunConfig cfg = parse_run_config(load_json_file(config_path));
    if (seed_flag) cfg.base_seed = *seed_flag;
    print_header("run", cfg.base_seed, "fingerprint=" + config_fingerprint(cfg));

    ExperimentResult res;
    try {
        res = run_experiment(cfg, jobs);
    } catch (const std::runtime_error& e) {
        std::cerr << "experiment failure: " << e.what() << "\n";
        return kExitCheckFailed;
    }

    std::filesystem::create_directories(out_dir);
    const StepsizePolicy policy = build_stepsize_policy(cfg);
    const RunMeta meta{cfg.algorithm, meta_d(cfg.problem), policy.initial(), cfg.Q, cfg.T};
    const auto trials_path = (std::filesystem::path(out_dir) / "trials.csv").string();
    const auto agg_path = (std::filesystem::path(out_dir) / "aggregate.csv").string();
    write_trial_csv(trials_path, meta, res.trials);
    write_aggregate_csv(agg_path, meta, res.aggregate);
    std::cerr << "wrote " << trials_path << " and " << agg_path << " (diverged trials: "
              << res.n_diverged << ")\n";
    return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag) {
    const json j = load_json_file(config_path);
    const RunConfig cfg = parse_run_config(j);
    const std::uint64_t seed = resolve_seed(seed_flag);
    print_header("verify", seed);

    const double probe_lo = j.value("probe_lo", -10.0);
    const double probe_hi = j.value("probe_hi", 30.0);
    const int probe_n = j.value("probe_points", 1000);
    const int n_samples = j.value("n_samples", 10000);

    const FederatedProblem problem = build_problem(cfg.problem);
    std::vector<Point> probes;
    probes.reserve(probe_n);
    for (int k = 0; k < probe_n; ++k)
        probes.push_back(Point{probe_lo + (probe_hi - probe_lo) * k / (probe_n - 1)});

    bool all_pass = true;
    std::cout << "agent  oracle                          unbiased  abc(C,D)        refuted\n";
    for (int i = 0; i < problem.n(); ++i) {
        const GradientOracle& oracle = problem.oracle(i);
        const NoiseStream stream = NoiseStream(seed).at_agent(static_cast<std::uint64_t>(i));

        const auto unb = check_unbiasedness(oracle, probes.front(), std::max(1000, n_samples),
                                            stream.at_round(1));
        const AbcClaim claim = oracle.claim().value_or(AbcClaim{0.0, 0.0});
        const auto abc = verify_abc(oracle, claim.C, claim.D, probes, n_samples,
                                    stream.at_round(2));

        std::string refuted = "skipped";
        if (oracle.noise_kind() == "sign_perturbation") {
            bool all = true;
            for (double c : {1.0, 4.0, 10.0}) {
                const auto w = refute_relaxed_growth(oracle, c, c);
                all = all && w.has_value() && w->second_moment > w->rhs;
            }
            refuted = all ? "yes" : "NO";
            all_pass = all_pass && all;
        }
        all_pass = all_pass && unb.pass && abc.pass;

        char line[160];
        std::snprintf(line, sizeof(line), "%5d  %-30s  %-8s  (%g,%g) %-6s  %s", i + 1,
                      oracle.noise_kind().c_str(), unb.pass ? "pass" : "FAIL", claim.C, claim.D,
                      abc.pass ? "pass" : "FAIL", refuted.c_str());
        std::cout << line << "\n";
    }
    std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_hetero(const std::string& config_path, const std::optional<std::uint64_t>& seed_flag) {
    const json j = load_json_file(config_path);
    const RunConfig cfg = parse_run_config(j);
    const std::uint64_t seed = resolve_seed(seed_flag);
    print_header("hetero", seed);

    const FederatedProblem problem = build_problem(cfg.problem);
    json report;
    report["seed"] = seed;
    report["sigma_f_star"] = sigma_f_star(problem, cfg.problem.f_star_tol);

    bool ok = true;
    if (problem.dimension() == 1) {
        try {
            BgdOptions opts;
            opts.x_lo = j.value("bgd_x_lo", opts.x_lo);
            opts.x_hi = j.value("bgd_x_hi", opts.x_hi);
            opts.grid = j.value("bgd_grid", opts.grid);
            const BgdEstimate bgd = estimate_bgd(problem, opts);
            report["bgd"] = {{"zeta2", bgd.zeta2}, {"psi2", bgd.psi2}, {"sum", bgd.sum()}};
        } catch (const EstimationError& e) {
            report["bgd_error"] = e.what();
            ok = false;
        }
    }

    if (j.contains("drift")) {
        const int Q = j["drift"].value("Q", 1);
        const double eta = j["drift"].value("eta", 1e-3);
        const auto min = certified_minimizer(problem.average(), problem.f_star_bracket(),
                                             cfg.problem.f_star_tol);
        try {
            report["rho"] = drift_at_optimum(problem, Q, eta, Point{min.x});
        } catch (const std::invalid_argument& e) {
            report["rho_error"] = e.what();  // nonconvex average: refuse rather than guess
        }
    }

    std::vector<Point> probes;
    const double lo = j.value("probe_lo", -10.0), hi = j.value("probe_hi", 10.0);
    const int pn = j.value("probe_points", 1000);
    for (int k = 0; k < pn; ++k) probes.push_back(Point{lo + (hi - lo) * k / (pn - 1)});
    const auto bound = check_dissimilarity_bound(problem, probes);
    report["bound_check"] = {{"pass", bound.pass}, {"min_slack", bound.min_slack}};
    ok = ok && bound.pass;

    std::cout << report.dump(2) << "\n";
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_table2(const std::vector<double>& d_values, std::int64_t T, int Q, double alpha,
               int n_runs, double x0, bool skip_bgd, const std::string& out_dir,
               const std::optional<std::uint64_t>& seed_flag, int jobs) {
    Table2Options opts;
    if (!d_values.empty()) opts.d_values = d_values;
    opts.T = T;
    opts.Q = Q;
    opts.alpha = alpha;
    opts.n_runs = n_runs;
    opts.x0 = x0;
    opts.seed = resolve_seed(seed_flag);
    opts.jobs = jobs;
    opts.with_bgd = !skip_bgd;
    print_header("table2", opts.seed);

    const auto rows = reproduce_table2(opts);
    json out = json::array();
    for (const auto& r : rows) {
        json row{{"d", r.d},
                 {"sigma_f_star", r.sigma_f_star},
                 {"fedavg_gap", r.fedavg_gap},
                 {"scaffold_gap", r.scaffold_gap}};
        if (opts.with_bgd) row["zeta2_plus_psi2"] = r.zeta2_plus_psi2;
        out.push_back(row);
    }
    std::cout << out.dump(2) << "\n";
    std::filesystem::create_directories(out_dir);
    const auto path = (std::filesystem::path(out_dir) / "table2.json").string();
    std::ofstream f(path);
    f << out.dump(2) << "\n";
    if (!f) throw std::runtime_error("write failure on '" + path + "'");
    std::cerr << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_fig1(const std::vector<double>& stepsizes, std::int64_t T, int n_runs,
             const std::string& out_dir, const std::optional<std::uint64_t>& seed_flag,
             int jobs) {
    Fig1Options opts;
    if (!stepsizes.empty()) opts.stepsizes = stepsizes;
    opts.T = T;
    opts.n_runs = n_runs;
    opts.seed = resolve_seed(seed_flag);
    opts.jobs = jobs;
    print_header("fig1", opts.seed);

    const auto curves = reproduce_fig1(opts);
    std::filesystem::create_directories(out_dir);
    const auto path = (std::filesystem::path(out_dir) / "fig1.csv").string();
    bool first = true;
    for (const auto& curve : curves) {
        const RunMeta meta{curve.algorithm, 0.0, curve.stepsize, opts.Q, opts.T};
        append_aggregate_csv(path, meta, curve.rounds, first);
        first = false;
    }
    std::cerr << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_stepsize(double L, double C, int Q, std::int64_t T, int n, const std::string& alg,
                 double eta_s) {
    std::cout.precision(12);
    if (alg == "fedavg") {
        const double alpha = stepsize_theorem1(L, C, Q, T, n);
        std::cout << "alpha = " << alpha << "\n";
        for (const auto& cap : theorem1_caps(alpha, L, C, Q, T, n))
            std::cout << "  cap " << cap.name << " = " << cap.cap << " : "
                      << (cap.satisfied ? "ok" : "VIOLATED") << "\n";
        return kExitOk;
    }
    if (alg == "scaffold") {
        const auto s = stepsize_scaffold(L, C, Q, T, n, eta_s);
        std::cout << "eta_tilde = " << s.eta_tilde << "\neta_a = " << s.eta_a
                  << " (eta_s = " << eta_s << ")\n";
        for (const auto& cap : scaffold_caps(s.eta_tilde, L, C, Q, T, n, eta_s))
            std::cout << "  cap " << cap.name << " = " << cap.cap << " : "
                      << (cap.satisfied ? "ok" : "VIOLATED") << "\n";
        return kExitOk;
    }
    throw CLI::ValidationError("--alg must be fedavg or scaffold");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated stochastic optimization: run, verify, measure, reproduce"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed_flag;
    int jobs = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "JSON config file");
        if (needs_config) c->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_flag, "seed override (falls back to FEDVAR_SEED, then 42)");
        sub->add_option("--jobs", jobs, "worker threads (0 = all, 1 = serial reference)");
    };

    auto* run = app.add_subcommand("run", "run an experiment from a config and write CSVs");
    add_common(run, true);

    auto* verify = app.add_subcommand("verify", "check unbiasedness, the variance envelope, and "
                                                "relaxed-growth refutation");
    add_common(verify, true);

    auto* hetero = app.add_subcommand("hetero", "heterogeneity report: sigma_f*, BGD estimate, "
                                                "optional drift");
    add_common(hetero, true);

    auto* table2 = app.add_subcommand("table2", "heterogeneity/performance comparison table");
    add_common(table2, false);
    std::vector<double> d_values;
    std::int64_t t2_T = 4000;
    int t2_Q = 17, t2_runs = 100;
    double t2_alpha = 0.00046, t2_x0 = 0.0;
    bool t2_skip_bgd = false;
    table2->add_option("--d", d_values, "d values (default -100 -50 -20 -2)");
    table2->add_option("--T", t2_T, "server rounds");
    table2->add_option("--Q", t2_Q, "local updates per round");
    table2->add_option("--alpha", t2_alpha, "stepsize for both methods");
    table2->add_option("--runs", t2_runs, "repeated runs per cell");
    table2->add_option("--x0", t2_x0, "initial point");
    table2->add_flag("--skip-bgd", t2_skip_bgd, "omit the BGD sweep (quick smoke)");

    auto* fig1 = app.add_subcommand("fig1", "convergence curves on the heterogeneous suite");
    add_common(fig1, false);
    std::vector<double> stepsizes;
    std::int64_t f1_T = 1000;
    int f1_runs = 100;
    fig1->add_option("--stepsizes", stepsizes, "stepsize sweep (default 0.0005 0.002 0.008)");
    fig1->add_option("--T", f1_T, "server rounds");
    fig1->add_option("--runs", f1_runs, "repeated runs per curve");

    auto* stepsize = app.add_subcommand("stepsize", "theory stepsize and its cap set");
    double ss_L = 1.0, ss_C = 0.0, ss_eta_s = 1.0;
    int ss_Q = 1, ss_n = 1;
    std::int64_t ss_T = 100;
    std::string ss_alg = "fedavg";
    stepsize->add_option("--L", ss_L, "smoothness constant")->required();
    stepsize->add_option("--C", ss_C, "variance-envelope C");
    stepsize->add_option("--Q", ss_Q, "local updates");
    stepsize->add_option("--T", ss_T, "server rounds");
    stepsize->add_option("--n", ss_n, "agents");
    stepsize->add_option("--alg", ss_alg, "fedavg | scaffold");
    stepsize->add_option("--eta-s", ss_eta_s, "server stepsize (scaffold)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_flag, jobs);
        if (verify->parsed()) return cmd_verify(config_path, seed_flag);
        if (hetero->parsed()) return cmd_hetero(config_path, seed_flag);
        if (table2->parsed())
            return cmd_table2(d_values, t2_T, t2_Q, t2_alpha, t2_runs, t2_x0, t2_skip_bgd,
                              out_dir, seed_flag, jobs);
        if (fig1->parsed()) return cmd_fig1(stepsizes, f1_T, f1_runs, out_dir, seed_flag, jobs);
        if (stepsize->parsed())
            return cmd_stepsize(ss_L, ss_C, ss_Q, ss_T, ss_n, ss_alg, ss_eta_s);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return kExitCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCheckFailed;
    }
    return kExitUsage;
}
