#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fedvar/problem.hpp"
#include "fedvar/stepsize.hpp"

namespace fedvar {

// Problem description as it appears in config files: either a named preset
// or an explicit agent/oracle list.
struct AgentSpec {
    std::string kind;  // huber | softplus | quadratic
    nlohmann::json params;
    int dimension = 1;
};

struct OracleSpec {
    std::string noise_kind;  // exact | sign_perturbation | additive_gaussian |
                             // finite_sum_with_replacement | finite_sum_without_replacement
    nlohmann::json params;
    std::optional<AbcClaim> claim;
};

struct ProblemSpec {
    std::string preset;  // "quadratic_huber_pair" | "softplus_suite" | "" for custom
    double d = -2.0;     // pair parameter
    int n_agents = 16;   // suite size
    std::vector<AgentSpec> agents;
    std::vector<OracleSpec> oracles;
    double bracket_lo = -50.0;
    double bracket_hi = 50.0;
    double f_star_tol = 1e-10;
};

struct StepsizeSpec {
    // manual | theorem1 | corollary1 | scaffold | scaffold_c0 | diminishing
    std::string kind = "manual";
    double alpha = 0.1;    // manual
    double L = 1.0;        // theory inputs
    double C = 0.0;
    double alpha0 = 1.0;   // diminishing
    double q = 0.6;
};

struct RunConfig {
    ProblemSpec problem;
    std::string algorithm = "fedavg";  // fedavg | scaffold
    StepsizeSpec stepsize;
    double eta_s = 1.0;
    int Q = 1;
    std::int64_t T = 1;
    int n_runs = 1;
    Point x0;  // empty means zeros of the problem dimension
    std::uint64_t base_seed = 42;
    std::int64_t record_every = 10;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

// Canonical serialization (sorted keys, full-precision numbers); its FNV-1a
// hash is the config fingerprint that pins down every emitted byte.
std::string canonical_config_string(const RunConfig& cfg);
std::string config_fingerprint(const RunConfig& cfg);

FederatedProblem build_problem(const ProblemSpec& spec);

// Resolves the stepsize spec against the run shape. For scaffold the policy
// yields the agent stepsize eta_a.
StepsizePolicy build_stepsize_policy(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace fedvar
