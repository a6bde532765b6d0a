#pragma once

#include <vector>

#include "fedvar/minimize.hpp"
#include "fedvar/objective.hpp"
#include "fedvar/oracle.hpp"

namespace fedvar {

// n (objective, oracle) pairs with equal weights plus the average objective f
// and its certified infimum f*.
class FederatedProblem {
public:
    FederatedProblem(std::vector<ObjectivePtr> agents, std::vector<OraclePtr> oracles,
                     Bracket f_star_bracket, double tol = 1e-10);
    // When the infimum of the average is known exactly (e.g. identical agents).
    FederatedProblem(std::vector<ObjectivePtr> agents, std::vector<OraclePtr> oracles,
                     double f_star);

    int n() const { return static_cast<int>(agents_.size()); }
    int dimension() const { return agents_.front()->dimension(); }
    const std::vector<ObjectivePtr>& agents() const { return agents_; }
    const std::vector<OraclePtr>& oracles() const { return oracles_; }
    const Objective& agent(int i) const { return *agents_[i]; }
    const GradientOracle& oracle(int i) const { return *oracles_[i]; }
    const Objective& average() const { return *average_; }
    ObjectivePtr average_ptr() const { return average_; }

    double f_star() const { return f_star_; }
    double L_mean() const { return L_mean_; }
    double L_max() const { return L_max_; }
    const Bracket& f_star_bracket() const { return bracket_; }

    // Mean of the agents' infima; f* >= this by construction.
    double mean_agent_f_inf() const;

private:
    void init(std::vector<ObjectivePtr> agents, std::vector<OraclePtr> oracles);

    std::vector<ObjectivePtr> agents_;
    std::vector<OraclePtr> oracles_;
    ObjectivePtr average_;
    double f_star_ = 0.0;
    double L_mean_ = 0.0;
    double L_max_ = 0.0;
    Bracket bracket_{0.0, 0.0};
};

// The exact mean of the agent objectives, with f* as its stored infimum.
ObjectivePtr average_objective(const FederatedProblem& problem);

}  // namespace fedvar
