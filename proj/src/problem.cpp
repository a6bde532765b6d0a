#include "fedvar/problem.hpp"

#include <algorithm>

namespace fedvar {

void FederatedProblem::init(std::vector<ObjectivePtr> agents, std::vector<OraclePtr> oracles) {
    if (agents.empty()) throw std::invalid_argument("problem needs at least one agent");
    if (agents.size() != oracles.size())
        throw std::invalid_argument("one oracle per agent required");
    const int dim = agents.front()->dimension();
    for (const auto& a : agents)
        if (a->dimension() != dim) throw std::invalid_argument("agents must share dimension");
    agents_ = std::move(agents);
    oracles_ = std::move(oracles);
    L_mean_ = 0.0;
    L_max_ = 0.0;
    for (const auto& a : agents_) {
        L_mean_ += a->smoothness();
        L_max_ = std::max(L_max_, a->smoothness());
    }
    L_mean_ /= static_cast<double>(agents_.size());
}

FederatedProblem::FederatedProblem(std::vector<ObjectivePtr> agents,
                                   std::vector<OraclePtr> oracles, Bracket f_star_bracket,
                                   double tol) {
    init(std::move(agents), std::move(oracles));
    bracket_ = f_star_bracket;
    const auto plain_average = make_average(agents_);
    f_star_ = certified_infimum(*plain_average, f_star_bracket, tol);
    if (f_star_ < mean_agent_f_inf() - tol)
        throw CertificationError("certified f* below the mean of agent infima");
    average_ = make_average(agents_, f_star_);
}

FederatedProblem::FederatedProblem(std::vector<ObjectivePtr> agents,
                                   std::vector<OraclePtr> oracles, double f_star) {
    init(std::move(agents), std::move(oracles));
    f_star_ = f_star;
    average_ = make_average(agents_, f_star_);
}

double FederatedProblem::mean_agent_f_inf() const {
    double s = 0.0;
    for (const auto& a : agents_) s += a->f_inf();
    return s / static_cast<double>(agents_.size());
}

ObjectivePtr average_objective(const FederatedProblem& problem) { return problem.average_ptr(); }

}  // namespace fedvar
