// Acceptance suite: one criterion per check, one PASS/FAIL line each, exit
// code = number of failures. Tolerances and thresholds are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedvar/csv.hpp"
#include "fedvar/harness.hpp"
#include "fedvar/problems.hpp"
#include "support.hpp"

using namespace fedvar;
namespace chrono = std::chrono;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    const char* label;
    std::function<bool(std::string&)> check;
};

double seconds_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double>(chrono::steady_clock::now() - t0).count();
}

// ---- 1: sigma_f* reproduction ----------------------------------------------
bool crit_sigma(std::string& note) {
    const auto t0 = chrono::steady_clock::now();
    const std::vector<std::pair<double, double>> expected{
        {-100.0, 49.625}, {-50.0, 24.625}, {-20.0, 9.625}, {-2.0, 0.625}};
    bool ok = true;
    std::ostringstream oss;
    for (const auto& [d, want] : expected) {
        const auto problem = make_quadratic_huber_pair(d);
        const double got = sigma_f_star(problem, 1e-9);
        if (std::abs(got - want) > 1e-6) {
            ok = false;
            oss << " d=" << d << " got " << got << " want " << want << ";";
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 1.0) {
        ok = false;
        oss << " runtime " << secs << "s >= 1s";
    }
    note = "four sigma values to 1e-6 in " + std::to_string(secs) + "s" + oss.str();
    return ok;
}

// ---- 2: BGD near-invariance -------------------------------------------------
bool crit_bgd(std::string& note) {
    const auto t0 = chrono::steady_clock::now();
    const std::vector<double> ds{-100.0, -50.0, -20.0, -2.0};
    std::vector<double> sums;
    double sigma_lo = 1e300, sigma_hi = 0.0;
    for (double d : ds) {
        const auto problem = make_quadratic_huber_pair(d);
        sums.push_back(estimate_bgd(problem).sum());
        const double s = problem.f_star() - problem.mean_agent_f_inf();
        sigma_lo = std::min(sigma_lo, s);
        sigma_hi = std::max(sigma_hi, s);
    }
    double lo = sums[0], hi = sums[0];
    for (double s : sums) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    const double spread = (hi - lo) / lo;
    const double secs = seconds_since(t0);

    std::ostringstream oss;
    oss << "sums {";
    for (double s : sums) oss << " " << s;
    oss << " } spread " << spread * 100.0 << "% sigma ratio " << sigma_hi / sigma_lo << " in "
        << secs << "s";
    note = oss.str();

    bool ok = lo >= 5.0 && hi <= 5.4;
    ok = ok && spread <= 0.02;
    ok = ok && sigma_hi / sigma_lo >= 79.0;
    ok = ok && secs < 30.0;
    return ok;
}

// ---- 3: heterogeneity/performance ordering ----------------------------------
bool crit_ordering(std::string& note) {
    const auto t0 = chrono::steady_clock::now();
    Table2Options opts;
    opts.d_values = {-2.0, -20.0, -50.0, -100.0};
    opts.with_bgd = false;  // measured separately in criterion 2
    const auto rows = reproduce_table2(opts);
    bool ok = true;
    std::ostringstream oss;
    oss << "gaps fedavg {";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        oss << " " << rows[i].fedavg_gap;
        if (i > 0 && !(rows[i].fedavg_gap > rows[i - 1].fedavg_gap)) ok = false;
    }
    oss << " } scaffold {";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        oss << " " << rows[i].scaffold_gap;
        if (i > 0 && !(rows[i].scaffold_gap > rows[i - 1].scaffold_gap)) ok = false;
    }
    const double secs = seconds_since(t0);
    oss << " } in " << secs << "s (target 120s)";
    note = oss.str();
    return ok;
}

// ---- 4: variance-envelope verification suite --------------------------------
bool crit_abc(std::string& note) {
    const auto t0 = chrono::steady_clock::now();
    const auto problem = make_softplus_suite(16);
    std::vector<Point> probes;
    for (double x : testsupport::grid(-10.0, 30.0, 1000)) probes.push_back(Point{x});
    bool ok = true;
    double worst = 1e300;
    for (int i = 0; i < problem.n(); ++i) {
        const auto report =
            verify_abc(problem.oracle(i), 1.0, 1.0, probes, 0, NoiseStream(1));
        ok = ok && report.pass;
        worst = std::min(worst, report.min_slack);
        const auto unb =
            check_unbiasedness(problem.oracle(i), Point{3.7}, 1000, NoiseStream(2));
        ok = ok && unb.exact && unb.pass;
    }
    const double secs = seconds_since(t0);
    if (secs >= 5.0) ok = false;
    note = "16 oracles x 1000 probes, min slack " + std::to_string(worst) + ", " +
           std::to_string(secs) + "s";
    return ok;
}

// ---- 5: relaxed-growth refutation --------------------------------------------
bool crit_refute(std::string& note) {
    const auto problem = make_softplus_suite(16);
    int checked = 0;
    for (int i = 0; i < problem.n(); ++i) {
        for (double c : {1.0, 4.0, 10.0}) {
            const auto w = refute_relaxed_growth(problem.oracle(i), c, c);
            if (!w || !(w->second_moment > w->rhs)) {
                note = "no verified witness for agent " + std::to_string(i + 1) +
                       " at sigma2=eta2=" + std::to_string(c);
                return false;
            }
            ++checked;
        }
    }
    note = std::to_string(checked) + " witnesses verified analytically";
    return true;
}

// ---- 6: stepsize formulas -----------------------------------------------------
bool crit_stepsize(std::string& note) {
    bool ok = true;
    std::ostringstream oss;
    const double a = stepsize_theorem1(1.0, 0.0, 1, 100, 1);
    if (std::abs(a - 0.0382646) > 1e-6) {
        ok = false;
        oss << " theorem1 " << a << " != 0.0382646;";
    }
    const double e = stepsize_scaffold(1.0, 0.0, 1, 100, 1, 1.0).eta_tilde;
    if (std::abs(e - 0.0354155) > 1e-6) {
        ok = false;
        oss << " scaffold " << e << " != 0.0354155;";
    }
    std::mt19937_64 rng(2027);
    std::uniform_real_distribution<double> uL(0.05, 10.0), uC(0.0, 10.0), uEta(1.0, 32.0);
    std::uniform_int_distribution<int> uQ(1, 64), un(1, 64);
    std::uniform_int_distribution<std::int64_t> uT(1, 1000000);
    int violations = 0;
    for (int k = 0; k < 1000; ++k) {
        const double L = uL(rng), C = uC(rng), eta_s = uEta(rng);
        const int Q = uQ(rng), n = un(rng);
        const std::int64_t T = uT(rng);
        const double alpha = stepsize_theorem1(L, C, Q, T, n);
        for (const auto& cap : theorem1_caps(alpha, L, C, Q, T, n))
            if (!cap.satisfied) ++violations;
        const auto s = stepsize_scaffold(L, C, Q, T, n, eta_s);
        for (const auto& cap : scaffold_caps(s.eta_tilde, L, C, Q, T, n, eta_s))
            if (!cap.satisfied) ++violations;
    }
    if (violations > 0) {
        ok = false;
        oss << " " << violations << " cap violations;";
    }
    note = "formula values to 1e-6, 1000 random tuples cap-clean" + oss.str();
    return ok;
}

// ---- 7: exact update identities ----------------------------------------------
bool crit_identities(std::string& note) {
    const auto problem = make_softplus_suite(16);
    const int Q = 17;
    const double alpha = 0.002, eta_a = 0.002, eta_s = 0.9;
    const NoiseStream ns_f = NoiseStream(31).at_trial(0);
    const NoiseStream ns_s = NoiseStream(32).at_trial(0);
    auto fa = make_fedavg_state({0.0});
    auto sc = make_scaffold_state({0.0}, problem.n());

    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        // FedAvg: x_{t+1} = x_t - (alpha/n) sum_i sum_l g(x_i^l)
        {
            const double x0 = fa.x[0];
            double gsum = 0.0;
            for (int i = 0; i < problem.n(); ++i) {
                Point xi{x0};
                for (int l = 0; l < Q; ++l) {
                    const auto g = problem.oracle(i).sample(xi, ns_f.at(t, i, l));
                    gsum += g[0];
                    xi[0] -= alpha * g[0];
                }
            }
            fedavg_round(fa, problem, alpha, Q, ns_f);
            const double expected = x0 - alpha / problem.n() * gsum;
            worst = std::max(worst, std::abs(fa.x[0] - expected) / (1.0 + std::abs(x0)));
        }
        // SCAFFOLD: the three control-variate identities
        {
            const double x0 = sc.x[0];
            const auto ci0 = sc.c_i;
            const double c0 = sc.c[0];
            std::vector<double> gsums(problem.n(), 0.0);
            for (int i = 0; i < problem.n(); ++i) {
                Point xi{x0};
                const double corr = c0 - ci0[i][0];
                for (int l = 0; l < Q; ++l) {
                    const auto g = problem.oracle(i).sample(xi, ns_s.at(t, i, l));
                    gsums[i] += g[0];
                    xi[0] -= eta_a * (g[0] + corr);
                }
            }
            scaffold_round(sc, problem, eta_a, eta_s, Q, ns_s);
            const double scale = 1.0 + std::abs(x0);
            double total = 0.0;
            double c_mean = 0.0;
            for (int i = 0; i < problem.n(); ++i) {
                worst = std::max(worst, std::abs(sc.c_i[i][0] - gsums[i] / Q) / scale);
                total += gsums[i];
                c_mean += sc.c_i[i][0];
            }
            c_mean /= problem.n();
            worst = std::max(worst, std::abs(sc.c[0] - c_mean) / (1.0 + std::abs(c_mean)));
            const double expected = x0 - eta_s * eta_a / problem.n() * total;
            worst = std::max(worst, std::abs(sc.x[0] - expected) / scale);
        }
    }
    note = "1000 rounds, worst relative identity residual " + std::to_string(worst);
    return worst <= 1e-12;
}

// ---- 8: reductions -------------------------------------------------------------
bool crit_reductions(std::string& note) {
    bool ok = true;
    std::ostringstream oss;
    // (a) n=1, Q=1 bit-equals reference SGD over 1e3 steps
    {
        const auto f = make_softplus(3.0);
        const auto oracle = make_sign_perturbation_oracle(f);
        const FederatedProblem problem({f}, {oracle}, 0.0);
        const NoiseStream ns = NoiseStream(77).at_trial(0);
        auto s = make_fedavg_state({1.0});
        for (int t = 0; t < 1000; ++t) fedavg_round(s, problem, 0.01, 1, ns);
        const auto ref = testsupport::reference_sgd(*oracle, {1.0}, 0.01, 1000, ns);
        if (s.x[0] != ref[0]) {
            ok = false;
            oss << " (a) fedavg != sgd bitwise;";
        }
    }
    // (b) zero-noise homogeneous FedAvg equals centralized GD exactly
    {
        const auto problem = make_identical_quadratics(6, 2.0, 1.0);
        auto s = make_fedavg_state({5.0});
        for (int t = 0; t < 60; ++t) fedavg_round(s, problem, 0.05, 4, NoiseStream(0));
        const auto gd = testsupport::local_gd(problem.agent(0), {5.0}, 0.05, 240);
        if (s.x[0] != gd[0]) {
            ok = false;
            oss << " (b) fedavg != centralized gd;";
        }
    }
    // (c) homogeneous SCAFFOLD equals FedAvg at alpha = eta_a eta_s per round
    {
        const auto problem = make_identical_quadratics(4, 2.0, 0.5);
        auto sc = make_scaffold_state({3.0}, problem.n());
        auto fa = make_fedavg_state({3.0});
        double worst = 0.0;
        for (int t = 0; t < 100; ++t) {
            scaffold_round(sc, problem, 0.04, 0.9, 1, NoiseStream(0));
            fedavg_round(fa, problem, 0.036, 1, NoiseStream(0));
            worst = std::max(worst, std::abs(sc.x[0] - fa.x[0]) / (1.0 + std::abs(fa.x[0])));
        }
        if (worst > 1e-12) {
            ok = false;
            oss << " (c) residual " << worst << ";";
        }
    }
    note = "sgd bit-equality, centralized-gd equality, scaffold/fedavg collapse" + oss.str();
    return ok;
}

// ---- 9: diminishing-stepsize decay proxy ----------------------------------------
bool crit_decay(std::string& note) {
    const auto t0 = chrono::steady_clock::now();
    RunConfig cfg;
    cfg.problem.preset = "softplus_suite";
    cfg.problem.n_agents = 16;
    cfg.algorithm = "fedavg";
    cfg.stepsize.kind = "diminishing";
    cfg.stepsize.alpha0 = 1.0;
    cfg.stepsize.q = 0.6;
    cfg.stepsize.L = 1.0;
    cfg.stepsize.C = 1.0;
    cfg.Q = 17;
    cfg.T = 100000;
    cfg.n_runs = 20;
    cfg.x0 = {0.0};
    cfg.base_seed = 7;
    cfg.record_every = 100;

    const auto res = run_experiment(cfg, 0);
    int passed = 0;
    for (const auto& tr : res.trials) {
        if (tr.diverged) continue;
        double rm100 = -1.0, rmT = -1.0;
        for (const auto& r : tr.rounds) {
            if (r.t == 100) rm100 = r.running_min_grad_norm_sq;
            if (r.t == cfg.T) rmT = r.running_min_grad_norm_sq;
        }
        if (rm100 > 0.0 && rmT < 0.1 * rm100) ++passed;
    }
    const double secs = seconds_since(t0);
    note = std::to_string(passed) + "/20 seeds decayed below 10% in " + std::to_string(secs) +
           "s";
    return passed >= 18 && secs < 120.0;
}

// ---- 10: byte-identical CSVs across job counts ----------------------------------
bool crit_determinism(std::string& note) {
    const std::string cli = FEDVAR_CLI_PATH;
    const auto dir = fs::temp_directory_path() / "fedvar_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({"problem": {"preset": "softplus_suite", "n": 8},
                   "algorithm": "scaffold",
                   "stepsize": {"kind": "manual", "alpha": 0.002},
                   "Q": 5, "T": 40, "n_runs": 6,
                   "x0": [0.0], "base_seed": 4242, "record_every": 4})";
    }
    auto run_with_jobs = [&](int jobs, const std::string& sub) {
        const auto out = dir / sub;
        const std::string cmd = cli + " run --config " + cfg_path.string() + " --out " +
                                out.string() + " --jobs " + std::to_string(jobs) +
                                " > /dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool ok = run_with_jobs(1, "j1") && run_with_jobs(2, "j2") && run_with_jobs(4, "j4");
    if (ok) {
        const auto t1 = slurp(dir / "j1" / "trials.csv");
        ok = ok && !t1.empty();
        ok = ok && t1 == slurp(dir / "j2" / "trials.csv");
        ok = ok && t1 == slurp(dir / "j4" / "trials.csv");
        const auto a1 = slurp(dir / "j1" / "aggregate.csv");
        ok = ok && a1 == slurp(dir / "j2" / "aggregate.csv");
        ok = ok && a1 == slurp(dir / "j4" / "aggregate.csv");
    }
    fs::remove_all(dir);
    note = ok ? "trials.csv and aggregate.csv byte-identical for jobs 1/2/4"
              : "outputs differ across job counts or run failed";
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "sigma_f* reproduction (1e-6, <1s)", crit_sigma},
        {2, "BGD near-invariance ([5.0,5.4], spread <= 2%)", crit_bgd},
        {3, "gap ordering in |d| for both algorithms", crit_ordering},
        {4, "variance envelope on all 16 oracles (<5s)", crit_abc},
        {5, "relaxed-growth refutation witnesses", crit_refute},
        {6, "theory stepsizes and cap sets", crit_stepsize},
        {7, "exact update identities over 1000 rounds", crit_identities},
        {8, "reductions to sgd / gd / fedavg", crit_reductions},
        {9, "diminishing-stepsize decay proxy (<2min)", crit_decay},
        {10, "byte-identical CSVs for any --jobs", crit_determinism},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string note;
        bool ok = false;
        try {
            ok = c.check(note);
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::printf("%s criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", c.id, c.label,
                    note.c_str());
        std::fflush(stdout);
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
