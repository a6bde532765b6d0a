#include "fedvar/stepsize.hpp"

#include <cmath>

namespace fedvar {

namespace {

void validate_common(double L, double C, int Q, std::int64_t T, int n) {
    if (!(L > 0.0)) throw std::invalid_argument("L must be positive");
    if (C < 0.0) throw std::invalid_argument("C must be >= 0");
    if (Q < 1) throw std::invalid_argument("Q must be >= 1");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double stepsize_theorem1(double L, double C, int Q, std::int64_t T, int n) {
    validate_common(L, C, Q, T, n);
    const double q = Q, t = static_cast<double>(T);
    const double gamma = C + std::cbrt(14.0 * q * q * q * L * L * (2.0 * C + 3.0 * L) * t) +
                         2.0 * std::sqrt(2.0 * q * C * L);
    return 1.0 / (std::sqrt(q * (L * L + C * C) * t / n) + gamma);
}

double stepsize_corollary1(double L, int Q, std::int64_t T, int n) {
    validate_common(L, 0.0, Q, T, n);
    const double q = Q, t = static_cast<double>(T);
    return 1.0 / (std::sqrt(q * L * L * t / n) + std::cbrt(42.0 * t) * q * L);
}

std::vector<CapCheck> theorem1_caps(double alpha, double L, double C, int Q, std::int64_t T,
                                    int n) {
    const double q = Q, t = static_cast<double>(T);
    std::vector<CapCheck> caps;
    auto add = [&](std::string name, double cap) {
        caps.push_back({std::move(name), cap, alpha <= cap});
    };
    add("sqrt(n / (Q (C^2 + L^2) T))", std::sqrt(n / (q * (C * C + L * L) * t)));
    add("(1 / (14 Q^3 L^2 (2C + 3L) T))^(1/3)",
        std::cbrt(1.0 / (14.0 * q * q * q * L * L * (2.0 * C + 3.0 * L) * t)));
    add("1 / C", C > 0.0 ? 1.0 / C : kInf);
    add("1 / (2 sqrt(2QCL))", C > 0.0 ? 1.0 / (2.0 * std::sqrt(2.0 * q * C * L)) : kInf);
    return caps;
}

ScaffoldStepsize stepsize_scaffold(double L, double C, int Q, std::int64_t T, int n,
                                   double eta_s) {
    validate_common(L, C, Q, T, n);
    if (!(eta_s > 0.0)) throw std::invalid_argument("eta_s must be positive");
    const double q = Q, t = static_cast<double>(T);
    const double gamma_s = std::sqrt(84.0 * L * (L + C)) / eta_s +
                           std::cbrt(560.0 * L * C * (L + C) * t / (eta_s * q));
    const double eta_tilde =
        1.0 / (std::sqrt((L * L + C * C) * t / (2.0 * n * q)) + 12.0 * (L + C) + gamma_s);
    return {eta_tilde, eta_tilde / (eta_s * q)};
}

ScaffoldStepsize stepsize_scaffold_c0(double L, int Q, std::int64_t T, int n, double eta_s) {
    validate_common(L, 0.0, Q, T, n);
    if (!(eta_s > 0.0)) throw std::invalid_argument("eta_s must be positive");
    const double q = Q, t = static_cast<double>(T);
    const double gamma_s = std::sqrt(84.0 * L * L) / eta_s + std::sqrt(70.0) * L;
    const double eta_tilde = 1.0 / (std::sqrt(L * L * t / (2.0 * n * q)) + gamma_s);
    return {eta_tilde, eta_tilde / (eta_s * q)};
}

std::vector<CapCheck> scaffold_caps(double eta_tilde, double L, double C, int Q, std::int64_t T,
                                    int n, double eta_s) {
    const double q = Q, t = static_cast<double>(T);
    std::vector<CapCheck> caps;
    auto add = [&](std::string name, double cap) {
        caps.push_back({std::move(name), cap, eta_tilde <= cap});
    };
    add("eta_s / sqrt(84 L (L + C))", eta_s / std::sqrt(84.0 * L * (L + C)));
    add("1 / (12 (L + C))", 1.0 / (12.0 * (L + C)));
    add("sqrt(2nQ / ((L^2 + C^2) T))", std::sqrt(2.0 * n * q / ((L * L + C * C) * t)));
    add("(eta_s^2 Q / (560 L C (L + C) T))^(1/3)",
        C > 0.0 ? std::cbrt(eta_s * eta_s * q / (560.0 * L * C * (L + C) * t)) : kInf);
    return caps;
}

double diminishing_cap(double L, double C, int Q) {
    validate_common(L, C, Q, 1, 1);
    const double q = Q;
    double cap = 1.0 / (2.0 * q * L * std::sqrt(3.0));
    if (C > 0.0) {
        cap = std::min(cap, 1.0 / C);
        cap = std::min(cap, 1.0 / (2.0 * std::sqrt(2.0 * q * C * L)));
    }
    return cap;
}

DiminishingPolicy::DiminishingPolicy(double alpha0, double q, double cap)
    : alpha0_(alpha0), q_(q), cap_(cap) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("alpha0 must be positive");
    if (!(q > 0.5) || !(q <= 1.0))
        throw std::invalid_argument("exponent q must lie in (1/2, 1]");
    if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
}

double DiminishingPolicy::alpha(std::int64_t t) const {
    return std::min(cap_, alpha0_ / std::pow(static_cast<double>(t + 1), q_));
}

StepsizePolicy StepsizePolicy::constant(double alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
    StepsizePolicy p;
    p.constant_ = alpha;
    return p;
}

StepsizePolicy StepsizePolicy::diminishing(DiminishingPolicy policy) {
    StepsizePolicy p;
    p.diminishing_ = policy;
    return p;
}

}  // namespace fedvar
