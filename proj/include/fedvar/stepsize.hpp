#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fedvar {

struct CapCheck {
    std::string name;
    double cap;        // +inf when inactive (e.g. 1/C with C = 0)
    bool satisfied;
};

// Constant stepsize alpha = 1 / (sqrt(Q (L^2 + C^2) T / n) + gamma) with
// gamma = C + (14 Q^3 L^2 (2C + 3L) T)^(1/3) + 2 sqrt(2 Q C L). Satisfies the
// full cap set below by construction.
double stepsize_theorem1(double L, double C, int Q, std::int64_t T, int n);

// C = 0 special case: alpha = 1 / (sqrt(Q L^2 T / n) + (42 T)^(1/3) Q L).
double stepsize_corollary1(double L, int Q, std::int64_t T, int n);

std::vector<CapCheck> theorem1_caps(double alpha, double L, double C, int Q, std::int64_t T,
                                    int n);

struct ScaffoldStepsize {
    double eta_tilde;  // effective stepsize eta_a * eta_s * Q
    double eta_a;      // agent stepsize for the given eta_s
};

// eta_tilde = 1 / (sqrt((L^2 + C^2) T / (2 n Q)) + 12 (L + C) + gamma_s),
// gamma_s = sqrt(84 L (L + C)) / eta_s + (560 L C (L + C) T / (eta_s Q))^(1/3).
// The cap set is guaranteed for eta_s >= 1 (the server-stepsize regime the
// analysis targets).
ScaffoldStepsize stepsize_scaffold(double L, double C, int Q, std::int64_t T, int n, double eta_s);

// The C = 0 corollary variant, whose constant (sqrt(70) L) differs from the
// general formula's 12 L; exposed separately rather than reconciled.
ScaffoldStepsize stepsize_scaffold_c0(double L, int Q, std::int64_t T, int n, double eta_s);

std::vector<CapCheck> scaffold_caps(double eta_tilde, double L, double C, int Q, std::int64_t T,
                                    int n, double eta_s);

// Diminishing-stepsize cap min{1/C, 1/(2QL sqrt(3)), 1/(2 sqrt(2QCL))} with
// the convention 1/0 = +inf.
double diminishing_cap(double L, double C, int Q);

// alpha_t = min(cap, alpha0 / (t+1)^q) with q in (1/2, 1], so that
// sum alpha_t = inf and sum alpha_t^2 < inf.
class DiminishingPolicy {
public:
    DiminishingPolicy(double alpha0, double q, double cap);
    double alpha(std::int64_t t) const;
    double cap() const { return cap_; }
    double alpha0() const { return alpha0_; }
    double exponent() const { return q_; }

private:
    double alpha0_;
    double q_;
    double cap_;
};

// Round-indexed stepsize schedule shared by the two algorithms.
class StepsizePolicy {
public:
    static StepsizePolicy constant(double alpha);
    static StepsizePolicy diminishing(DiminishingPolicy policy);

    double alpha(std::int64_t t) const {
        return diminishing_ ? diminishing_->alpha(t) : constant_;
    }
    bool is_constant() const { return !diminishing_.has_value(); }
    double initial() const { return alpha(0); }

private:
    StepsizePolicy() = default;
    double constant_ = 0.0;
    std::optional<DiminishingPolicy> diminishing_;
};

}  // namespace fedvar
