#pragma once

#include <optional>
#include <vector>

#include "fedvar/problem.hpp"

namespace fedvar {

class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// sigma_f* = f* - (1/n) sum_i f_i*, the heterogeneity measure. Uses the
// stored agent infima and re-certifies f* on the problem's bracket to tol.
double sigma_f_star(const FederatedProblem& problem, double tol = 1e-10);

// (1/n) sum_i ||grad f_i(x) - grad f(x)||^2 from the analytic gradients.
double gradient_dissimilarity(const FederatedProblem& problem, const Point& x);

struct BoundCheck {
    bool pass;
    double min_slack;  // min over probes of RHS - LHS
    Point worst_point;
};

// Dissimilarity bound: (1/n) sum ||grad f_i - grad f||^2
//   <= 2L (f(x) - f*) + 2L sigma_f*, with L the max agent constant.
BoundCheck check_dissimilarity_bound(const FederatedProblem& problem,
                                     const std::vector<Point>& probe_points);

struct BgdEstimate {
    double zeta2;
    double psi2;
    double sum() const { return zeta2 + psi2; }
};

struct BgdOptions {
    double x_lo = -1000.0;
    double x_hi = 1000.0;
    int grid = 100000;
    double psi2_hi = 10.0;  // initial sweep range, expanded on demand
    bool parallel = true;   // OpenMP over the x grid; serial path kept for testing
};

// Approximate solution of the bounded-gradient-dissimilarity subproblem:
// for each psi^2 of a golden-section sweep, zeta^2(psi^2) is the grid maximum
// of [dissimilarity(x) - psi^2 ||grad f(x)||^2]_+ with local refinement, and
// the sweep minimizes zeta^2(psi^2) + psi^2. The sup over all of R is
// truncated to [x_lo, x_hi]; an inner maximum that keeps growing at the
// domain edge raises EstimationError.
BgdEstimate estimate_bgd(const FederatedProblem& problem, const BgdOptions& opts = {});

// rho = || (1/n) sum_i (x* - x_i^(Q)) / (eta Q) || where x_i^(Q) is Q
// deterministic full-gradient steps of agent i from x*. Requires
// ||grad f(x*)|| <= 1e-8.
double drift_at_optimum(const FederatedProblem& problem, int Q, double eta, const Point& x_star);

struct SandwichCheck {
    bool pass;
    double min_lower_slack;  // min over probes of mid - lower
    double min_upper_slack;  // min over probes of upper - mid
};

// PL sandwich: 2mu (f - f*) + 2mu sigma_f* <= (1/n) sum ||grad f_i||^2
//   <= 2L (f - f*) + 2L sigma_f*. Every agent must carry a PL constant >= mu.
SandwichCheck pl_sandwich_check(const FederatedProblem& problem, double mu,
                                const std::vector<Point>& probe_points);

struct HeterogeneityReport {
    double sigma_f_star;
    std::optional<BgdEstimate> bgd;
    std::optional<double> rho;
    BoundCheck bound_check;
};

}  // namespace fedvar
