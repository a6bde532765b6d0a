// Timing comparison of the serial reference loops against the OpenMP paths:
// trial fan-out on the heterogeneous suite and the BGD grid sweep. Verifies
// the parallel results match the serial ones before reporting speedups.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fedvar/harness.hpp"
#include "fedvar/problems.hpp"

using namespace fedvar;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::steady_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    std::printf("threads: %d\n\n", threads);

    {
        RunConfig cfg;
        cfg.problem.preset = "softplus_suite";
        cfg.problem.n_agents = 16;
        cfg.algorithm = "fedavg";
        cfg.stepsize.kind = "manual";
        cfg.stepsize.alpha = 0.002;
        cfg.Q = 17;
        cfg.T = 400;
        cfg.n_runs = 32;
        cfg.x0 = {0.0};
        cfg.record_every = 10;
        const FederatedProblem problem = build_problem(cfg.problem);

        auto t0 = chrono::steady_clock::now();
        const auto serial = run_trials_serial(cfg, problem);
        const double serial_ms = ms_since(t0);

        t0 = chrono::steady_clock::now();
        const auto parallel = run_trials_parallel(cfg, problem, 0);
        const double parallel_ms = ms_since(t0);

        bool equal = serial.size() == parallel.size();
        for (std::size_t k = 0; equal && k < serial.size(); ++k)
            equal = serial[k].final_gap == parallel[k].final_gap;
        std::printf("trial fan-out (suite, T=%lld, runs=%d):\n", (long long)cfg.T, cfg.n_runs);
        std::printf("  serial   %8.1f ms\n", serial_ms);
        std::printf("  parallel %8.1f ms   speedup %.2fx   results %s\n\n", parallel_ms,
                    serial_ms / parallel_ms, equal ? "identical" : "DIFFER");
        if (!equal) return 1;
    }

    {
        const FederatedProblem problem = make_quadratic_huber_pair(-50.0);
        BgdOptions par;
        BgdOptions ser;
        ser.parallel = false;

        auto t0 = chrono::steady_clock::now();
        const auto a = estimate_bgd(problem, ser);
        const double serial_ms = ms_since(t0);

        t0 = chrono::steady_clock::now();
        const auto b = estimate_bgd(problem, par);
        const double parallel_ms = ms_since(t0);

        const bool equal =
            std::abs(a.zeta2 - b.zeta2) < 1e-12 && std::abs(a.psi2 - b.psi2) < 1e-12;
        std::printf("bgd sweep (pair d=-50, grid=%d):\n", par.grid);
        std::printf("  serial   %8.1f ms\n", serial_ms);
        std::printf("  parallel %8.1f ms   speedup %.2fx   results %s\n", parallel_ms,
                    serial_ms / parallel_ms, equal ? "identical" : "DIFFER");
        if (!equal) return 1;
    }
    return 0;
}
