#include "fedvar/problems.hpp"

#include <cmath>

namespace fedvar {

FederatedProblem make_softplus_suite(int n, double f_star_tol) {
    if (n < 2) throw std::invalid_argument("suite needs n >= 2 agents");
    const AbcClaim claim{1.0, 1.0};
    std::vector<ObjectivePtr> agents;
    std::vector<OraclePtr> oracles;
    agents.push_back(make_huber({0.0}));
    oracles.push_back(make_sign_perturbation_oracle(agents.back(), std::nullopt, claim));
    for (int i = 2; i <= n; ++i) {
        agents.push_back(make_softplus(static_cast<double>(i)));
        oracles.push_back(make_sign_perturbation_oracle(agents.back(), std::nullopt, claim));
    }
    // the average is coercive (huber term), minimum near the origin
    return FederatedProblem(std::move(agents), std::move(oracles), Bracket{-30.0, 30.0},
                            f_star_tol);
}

namespace {

FederatedProblem make_pair(double d, bool exact_oracles, double f_star_tol) {
    std::vector<ObjectivePtr> agents;
    agents.push_back(make_quadratic(2.0, {0.0}));  // f_1(x) = x^2
    agents.push_back(make_huber({d}));
    std::vector<OraclePtr> oracles;
    for (const auto& a : agents) {
        oracles.push_back(exact_oracles
                              ? make_exact_oracle(a)
                              : make_sign_perturbation_oracle(a, std::nullopt, AbcClaim{1.0, 1.0}));
    }
    const double r = std::abs(d) + 10.0;
    return FederatedProblem(std::move(agents), std::move(oracles), Bracket{-r, r}, f_star_tol);
}

}  // namespace

FederatedProblem make_quadratic_huber_pair(double d, double f_star_tol) {
    return make_pair(d, false, f_star_tol);
}

FederatedProblem make_quadratic_huber_pair_exact(double d, double f_star_tol) {
    return make_pair(d, true, f_star_tol);
}

FederatedProblem make_identical_quadratics(int n, double a, double c) {
    if (n < 1) throw std::invalid_argument("need n >= 1");
    std::vector<ObjectivePtr> agents;
    std::vector<OraclePtr> oracles;
    for (int i = 0; i < n; ++i) {
        agents.push_back(make_quadratic(a, {c}));
        oracles.push_back(make_exact_oracle(agents.back()));
    }
    return FederatedProblem(std::move(agents), std::move(oracles), /*f_star=*/0.0);
}

}  // namespace fedvar
