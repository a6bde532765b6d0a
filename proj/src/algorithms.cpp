#include "fedvar/algorithms.hpp"

#include <cmath>

namespace fedvar {

namespace {

constexpr double kDivergenceRadius = 1e12;

void check_finite(const Point& x, std::int64_t round) {
    if (!all_finite(std::span<const double>(x)))
        throw DivergenceError(round, "non-finite iterate at round " + std::to_string(round));
    if (norm_sq(std::span<const double>(x)) > kDivergenceRadius * kDivergenceRadius)
        throw DivergenceError(round, "iterate norm exceeded 1e12 at round " + std::to_string(round));
}

}  // namespace

FedAvgState make_fedavg_state(Point x0) { return FedAvgState{std::move(x0), 0}; }

ScaffoldState make_scaffold_state(Point x0, int n_agents, std::vector<Point> c_init) {
    if (n_agents < 1) throw std::invalid_argument("need at least one agent");
    const std::size_t dim = x0.size();
    ScaffoldState s;
    s.x = std::move(x0);
    if (c_init.empty()) {
        s.c_i.assign(n_agents, Point(dim, 0.0));
    } else {
        if (static_cast<int>(c_init.size()) != n_agents)
            throw std::invalid_argument("one initial control variate per agent required");
        for (const auto& c : c_init)
            if (c.size() != dim) throw std::invalid_argument("control variate dimension mismatch");
        s.c_i = std::move(c_init);
    }
    // server initializes c_0 = (1/n) sum c_{i,0}
    s.c.assign(dim, 0.0);
    for (const auto& ci : s.c_i)
        axpy(1.0 / n_agents, std::span<const double>(ci), std::span<double>(s.c));
    return s;
}

void fedavg_round(FedAvgState& state, const FederatedProblem& problem, double alpha_t, int Q,
                  const NoiseStream& stream) {
    if (!(alpha_t > 0.0)) throw std::invalid_argument("alpha_t must be positive");
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    const int n = problem.n();
    const int dim = problem.dimension();
    const auto round = static_cast<std::uint64_t>(state.t);

    Point next(dim, 0.0);
    Point xi(dim), g(dim);
    for (int i = 0; i < n; ++i) {
        copy_into(std::span<const double>(state.x), std::span<double>(xi));
        for (int l = 0; l < Q; ++l) {
            const NoiseStream draw =
                stream.at(round, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(l));
            problem.oracle(i).sample(std::span<const double>(xi), std::span<double>(g), draw);
            axpy(-alpha_t, std::span<const double>(g), std::span<double>(xi));
        }
        axpy(1.0 / n, std::span<const double>(xi), std::span<double>(next));
    }
    check_finite(next, state.t);
    state.x = std::move(next);
    ++state.t;
}

void scaffold_round(ScaffoldState& state, const FederatedProblem& problem, double eta_a,
                    double eta_s, int Q, const NoiseStream& stream) {
    if (!(eta_a > 0.0) || !(eta_s > 0.0))
        throw std::invalid_argument("eta_a and eta_s must be positive");
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    const int n = problem.n();
    if (static_cast<int>(state.c_i.size()) != n)
        throw std::invalid_argument("state has wrong number of control variates");
    const int dim = problem.dimension();
    const auto round = static_cast<std::uint64_t>(state.t);

    Point x_next = state.x;
    Point c_next = state.c;
    Point xi(dim), g(dim), correction(dim);
    for (int i = 0; i < n; ++i) {
        copy_into(std::span<const double>(state.x), std::span<double>(xi));
        for (int j = 0; j < dim; ++j) correction[j] = state.c[j] - state.c_i[i][j];
        for (int l = 0; l < Q; ++l) {
            const NoiseStream draw =
                stream.at(round, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(l));
            problem.oracle(i).sample(std::span<const double>(xi), std::span<double>(g), draw);
            for (int j = 0; j < dim; ++j) xi[j] -= eta_a * (g[j] + correction[j]);
        }
        // c_{i,t+1} = c_{i,t} - c_t + (x_t - x_i^Q) / (eta_a Q)
        Point ci_next(dim);
        for (int j = 0; j < dim; ++j)
            ci_next[j] = state.c_i[i][j] - state.c[j] + (state.x[j] - xi[j]) / (eta_a * Q);
        // server accumulators: x_{t+1} += (eta_s/n)(x_i^Q - x_t),
        // c_{t+1} += (1/n)(c_{i,t+1} - c_{i,t})
        for (int j = 0; j < dim; ++j) {
            x_next[j] += eta_s / n * (xi[j] - state.x[j]);
            c_next[j] += (ci_next[j] - state.c_i[i][j]) / n;
        }
        state.c_i[i] = std::move(ci_next);
    }
    check_finite(x_next, state.t);
    state.x = std::move(x_next);
    state.c = std::move(c_next);
    ++state.t;
}

}  // namespace fedvar
