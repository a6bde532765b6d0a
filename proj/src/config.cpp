#include "fedvar/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "fedvar/problems.hpp"

namespace fedvar {

using nlohmann::json;

namespace {

Point parse_point(const json& j) {
    if (j.is_number()) return {j.get<double>()};
    Point p;
    for (const auto& v : j) p.push_back(v.get<double>());
    return p;
}

AgentSpec parse_agent(const json& j) {
    AgentSpec a;
    a.kind = j.at("kind").get<std::string>();
    a.params = j.value("params", json::object());
    a.dimension = j.value("dimension", 1);
    return a;
}

ObjectivePtr build_agent(const AgentSpec& a) {
    if (a.kind == "huber") {
        Point center = a.params.contains("center") ? parse_point(a.params["center"])
                                                   : Point(a.dimension, 0.0);
        return make_huber(std::move(center));
    }
    if (a.kind == "softplus")
        return make_softplus(a.params.value("shift", 1.0), a.dimension);
    if (a.kind == "quadratic") {
        Point center = a.params.contains("center") ? parse_point(a.params["center"])
                                                   : Point(a.dimension, 0.0);
        return make_quadratic(a.params.value("a", 1.0), std::move(center));
    }
    throw std::invalid_argument("unknown objective kind '" + a.kind + "'");
}

OraclePtr build_oracle(const OracleSpec& o, const ObjectivePtr& obj) {
    if (o.noise_kind == "exact") return make_exact_oracle(obj, o.claim);
    if (o.noise_kind == "sign_perturbation") {
        std::optional<MagnitudeRule> rule;
        if (o.params.contains("magnitude")) {
            const auto m = o.params["magnitude"].get<std::string>();
            if (m == "sqrt_abs_deviation")
                rule = MagnitudeRule::SqrtAbsDeviation;
            else if (m == "sqrt_value_gap")
                rule = MagnitudeRule::SqrtValueGap;
            else
                throw std::invalid_argument("unknown magnitude rule '" + m + "'");
        }
        return make_sign_perturbation_oracle(obj, rule, o.claim);
    }
    if (o.noise_kind == "additive_gaussian")
        return make_additive_gaussian_oracle(obj, o.params.value("variance", 1.0), o.claim);
    if (o.noise_kind == "finite_sum_with_replacement" ||
        o.noise_kind == "finite_sum_without_replacement") {
        std::vector<ObjectivePtr> comps;
        for (const auto& cj : o.params.at("components")) comps.push_back(build_agent(parse_agent(cj)));
        const auto strategy = o.noise_kind == "finite_sum_with_replacement"
                                  ? SamplingStrategy::WithReplacement
                                  : SamplingStrategy::WithoutReplacement;
        return make_finite_sum_oracle(std::move(comps), strategy, o.params.value("batch", 1),
                                      o.claim);
    }
    throw std::invalid_argument("unknown noise kind '" + o.noise_kind + "'");
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    RunConfig cfg;
    const json& p = j.at("problem");
    cfg.problem.preset = p.value("preset", std::string{});
    cfg.problem.d = p.value("d", -2.0);
    cfg.problem.n_agents = p.value("n", 16);
    cfg.problem.bracket_lo = p.value("bracket_lo", -50.0);
    cfg.problem.bracket_hi = p.value("bracket_hi", 50.0);
    cfg.problem.f_star_tol = p.value("f_star_tol", 1e-10);
    if (cfg.problem.preset.empty()) {
        if (!p.contains("agents")) throw std::invalid_argument("custom problem needs 'agents'");
        for (const auto& aj : p["agents"]) cfg.problem.agents.push_back(parse_agent(aj));
        if (!p.contains("oracles")) throw std::invalid_argument("custom problem needs 'oracles'");
        for (const auto& oj : p["oracles"]) {
            OracleSpec os;
            os.noise_kind = oj.at("noise_kind").get<std::string>();
            os.params = oj.value("params", json::object());
            if (oj.contains("C") || oj.contains("D"))
                os.claim = AbcClaim{oj.value("C", 0.0), oj.value("D", 0.0)};
            cfg.problem.oracles.push_back(std::move(os));
        }
        if (cfg.problem.agents.size() != cfg.problem.oracles.size())
            throw std::invalid_argument("agents and oracles must pair up");
        cfg.problem.n_agents = static_cast<int>(cfg.problem.agents.size());
    } else if (cfg.problem.preset == "quadratic_huber_pair" ||
               cfg.problem.preset == "quadratic_huber_pair_exact") {
        cfg.problem.n_agents = 2;
    }

    cfg.algorithm = j.value("algorithm", std::string{"fedavg"});
    if (cfg.algorithm != "fedavg" && cfg.algorithm != "scaffold")
        throw std::invalid_argument("algorithm must be fedavg or scaffold");

    if (j.contains("stepsize")) {
        const json& s = j["stepsize"];
        cfg.stepsize.kind = s.value("kind", std::string{"manual"});
        cfg.stepsize.alpha = s.value("alpha", 0.1);
        cfg.stepsize.L = s.value("L", 1.0);
        cfg.stepsize.C = s.value("C", 0.0);
        cfg.stepsize.alpha0 = s.value("alpha0", 1.0);
        cfg.stepsize.q = s.value("q", 0.6);
    }
    cfg.eta_s = j.value("eta_s", 1.0);
    cfg.Q = j.value("Q", 1);
    cfg.T = j.value("T", std::int64_t{1});
    cfg.n_runs = j.value("n_runs", 1);
    if (j.contains("x0")) cfg.x0 = parse_point(j["x0"]);
    cfg.base_seed = j.value("base_seed", std::uint64_t{42});
    cfg.record_every = j.value("record_every", std::int64_t{10});

    if (cfg.T < 1) throw std::invalid_argument("T must be >= 1");
    if (cfg.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
    if (cfg.Q < 1) throw std::invalid_argument("Q must be >= 1");
    if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in '" + path + "': " + e.what());
    }
    return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    json p;
    p["preset"] = cfg.problem.preset;
    p["d"] = cfg.problem.d;
    p["n"] = cfg.problem.n_agents;
    p["bracket_lo"] = cfg.problem.bracket_lo;
    p["bracket_hi"] = cfg.problem.bracket_hi;
    p["f_star_tol"] = cfg.problem.f_star_tol;
    if (cfg.problem.preset.empty()) {
        json agents = json::array();
        for (const auto& a : cfg.problem.agents)
            agents.push_back({{"kind", a.kind}, {"params", a.params}, {"dimension", a.dimension}});
        p["agents"] = agents;
        json oracles = json::array();
        for (const auto& o : cfg.problem.oracles) {
            json oj{{"noise_kind", o.noise_kind}, {"params", o.params}};
            if (o.claim) {
                oj["C"] = o.claim->C;
                oj["D"] = o.claim->D;
            }
            oracles.push_back(oj);
        }
        p["oracles"] = oracles;
    }
    j["problem"] = p;
    j["algorithm"] = cfg.algorithm;
    j["stepsize"] = {{"kind", cfg.stepsize.kind}, {"alpha", cfg.stepsize.alpha},
                     {"L", cfg.stepsize.L},       {"C", cfg.stepsize.C},
                     {"alpha0", cfg.stepsize.alpha0}, {"q", cfg.stepsize.q}};
    j["eta_s"] = cfg.eta_s;
    j["Q"] = cfg.Q;
    j["T"] = cfg.T;
    j["n_runs"] = cfg.n_runs;
    j["x0"] = cfg.x0;
    j["base_seed"] = cfg.base_seed;
    j["record_every"] = cfg.record_every;
    return j;
}

std::string canonical_config_string(const RunConfig& cfg) {
    // nlohmann objects keep keys sorted; dump() with full float precision is
    // the canonical byte string
    return to_json(cfg).dump();
}

std::string config_fingerprint(const RunConfig& cfg) {
    const std::string s = canonical_config_string(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

FederatedProblem build_problem(const ProblemSpec& spec) {
    if (spec.preset == "quadratic_huber_pair") return make_quadratic_huber_pair(spec.d);
    if (spec.preset == "quadratic_huber_pair_exact")
        return make_quadratic_huber_pair_exact(spec.d);
    if (spec.preset == "softplus_suite") return make_softplus_suite(spec.n_agents);
    if (!spec.preset.empty())
        throw std::invalid_argument("unknown problem preset '" + spec.preset + "'");

    std::vector<ObjectivePtr> agents;
    std::vector<OraclePtr> oracles;
    for (std::size_t i = 0; i < spec.agents.size(); ++i) {
        agents.push_back(build_agent(spec.agents[i]));
        oracles.push_back(build_oracle(spec.oracles[i], agents.back()));
    }
    return FederatedProblem(std::move(agents), std::move(oracles),
                            Bracket{spec.bracket_lo, spec.bracket_hi}, spec.f_star_tol);
}

StepsizePolicy build_stepsize_policy(const RunConfig& cfg) {
    const auto& s = cfg.stepsize;
    if (s.kind == "manual") return StepsizePolicy::constant(s.alpha);
    if (s.kind == "theorem1")
        return StepsizePolicy::constant(stepsize_theorem1(s.L, s.C, cfg.Q, cfg.T, cfg.problem.n_agents));
    if (s.kind == "corollary1")
        return StepsizePolicy::constant(stepsize_corollary1(s.L, cfg.Q, cfg.T, cfg.problem.n_agents));
    if (s.kind == "scaffold")
        return StepsizePolicy::constant(
            stepsize_scaffold(s.L, s.C, cfg.Q, cfg.T, cfg.problem.n_agents, cfg.eta_s).eta_a);
    if (s.kind == "scaffold_c0")
        return StepsizePolicy::constant(
            stepsize_scaffold_c0(s.L, cfg.Q, cfg.T, cfg.problem.n_agents, cfg.eta_s).eta_a);
    if (s.kind == "diminishing")
        return StepsizePolicy::diminishing(
            DiminishingPolicy(s.alpha0, s.q, diminishing_cap(s.L, s.C, cfg.Q)));
    throw std::invalid_argument("unknown stepsize kind '" + s.kind + "'");
}

}  // namespace fedvar
