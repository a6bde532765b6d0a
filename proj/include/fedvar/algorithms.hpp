#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fedvar/problem.hpp"
#include "fedvar/rng.hpp"
#include "fedvar/stepsize.hpp"

namespace fedvar {

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::int64_t round, std::string what)
        : std::runtime_error(std::move(what)), round_(round) {}
    std::int64_t round() const { return round_; }

private:
    std::int64_t round_;
};

struct FedAvgState {
    Point x;
    std::int64_t t = 0;
};

struct ScaffoldState {
    Point x;
    Point c;                   // server control variate, always (1/n) sum c_i
    std::vector<Point> c_i;    // agent control variates
    std::int64_t t = 0;
};

FedAvgState make_fedavg_state(Point x0);

// c_{i,0} default to zero vectors, so c_0 = (1/n) sum c_{i,0} trivially; a
// custom initialization (e.g. one-sample gradient warm start) may be passed.
ScaffoldState make_scaffold_state(Point x0, int n_agents,
                                  std::vector<Point> c_init = {});

// One FedAvg round: each agent runs Q local steps
// x_i^(l+1) = x_i^l - alpha g_i(x_i^l; xi), the server averages the results.
// `stream` must carry the trial coordinate; round/agent/step are derived.
// Throws DivergenceError on non-finite iterates or ||x|| > 1e12.
void fedavg_round(FedAvgState& state, const FederatedProblem& problem, double alpha_t, int Q,
                  const NoiseStream& stream);

// One SCAFFOLD round: local steps x_i^(l+1) = x_i^l - eta_a (g_i - c_i + c),
// agent update c_i <- c_i - c + (x_t - x_i^Q) / (eta_a Q), server averaging
// x <- x + (eta_s/n) sum (x_i^Q - x) and c <- c + (1/n) sum (c_i^new - c_i).
void scaffold_round(ScaffoldState& state, const FederatedProblem& problem, double eta_a,
                    double eta_s, int Q, const NoiseStream& stream);

}  // namespace fedvar
