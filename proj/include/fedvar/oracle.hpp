#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedvar/objective.hpp"
#include "fedvar/rng.hpp"

namespace fedvar {

// Claimed variance envelope: E||g - grad f_i(x)||^2 <= C (f_i(x) - f_i*) + D.
struct AbcClaim {
    double C = 0.0;
    double D = 0.0;
};

struct SupportAtom {
    double prob;
    Point grad;
};

// Unbiased stochastic gradient oracle attached to an objective. Immutable;
// sampling is a pure function of (x, stream coordinates), so concurrent draws
// from disjoint coordinates are race-free and deterministic.
class GradientOracle {
public:
    virtual ~GradientOracle() = default;

    const Objective& objective() const { return *objective_; }
    ObjectivePtr objective_ptr() const { return objective_; }
    const std::string& noise_kind() const { return noise_kind_; }
    const std::optional<AbcClaim>& claim() const { return claim_; }

    // One draw g with E[g] = grad f_i(x). Consumes counter values of `stream`
    // starting at 0; identical coordinates give identical draws.
    virtual void sample(std::span<const double> x, std::span<double> g,
                        const NoiseStream& stream) const = 0;

    Point sample(const Point& x, const NoiseStream& stream) const {
        Point g(x.size());
        sample(std::span<const double>(x), std::span<double>(g), stream);
        return g;
    }

    virtual bool finite_support() const = 0;

    // Exhaustive noise support at x with probabilities summing to 1. Throws
    // for oracles without finite support (AdditiveGaussian).
    virtual std::vector<SupportAtom> support(std::span<const double> x) const = 0;

protected:
    GradientOracle(ObjectivePtr obj, std::string noise_kind,
                   std::optional<AbcClaim> claim = std::nullopt)
        : objective_(std::move(obj)), noise_kind_(std::move(noise_kind)), claim_(claim) {
        if (!objective_) throw std::invalid_argument("oracle requires an objective");
    }

private:
    ObjectivePtr objective_;
    std::string noise_kind_;
    std::optional<AbcClaim> claim_;
};

using OraclePtr = std::shared_ptr<const GradientOracle>;

enum class MagnitudeRule {
    SqrtAbsDeviation,  // m(x) = sqrt(||x - center||), the paper's Huber-agent rule
    SqrtValueGap,      // m(x) = sqrt(f(x) - f_inf), the softplus/quadratic rule
};

// Zero-noise oracle: returns the exact gradient.
OraclePtr make_exact_oracle(ObjectivePtr obj, std::optional<AbcClaim> claim = std::nullopt);

// Two-point oracle g = grad f(x) +/- m(x) u with a fair sign and fixed unit
// direction u; conditional variance is exactly m(x)^2. Default magnitude rule:
// SqrtAbsDeviation for huber objectives, SqrtValueGap otherwise.
OraclePtr make_sign_perturbation_oracle(ObjectivePtr obj,
                                        std::optional<MagnitudeRule> rule = std::nullopt,
                                        std::optional<AbcClaim> claim = std::nullopt);

enum class SamplingStrategy { WithReplacement, WithoutReplacement };

// Subsampled finite-sum oracle over (1/m) sum f_j: draws
// grad F(x; xi) = (1/m) sum_j [xi]_j grad f_j(x) with E[xi]_j = 1.
OraclePtr make_finite_sum_oracle(std::vector<ObjectivePtr> components, SamplingStrategy strategy,
                                 int batch, std::optional<AbcClaim> claim = std::nullopt);

// g = grad f(x) + N(0, variance I).
OraclePtr make_additive_gaussian_oracle(ObjectivePtr obj, double variance,
                                        std::optional<AbcClaim> claim = std::nullopt);

// ---- verification / refutation -------------------------------------------

// Exact E||g||^2 by support enumeration. Throws for AdditiveGaussian; its
// second moment has the closed form ||grad f||^2 + p * variance instead.
double exact_second_moment(const GradientOracle& oracle, const Point& x);

struct AbcProbe {
    Point x;
    double variance;       // exact or estimated E||g - grad f||^2
    double bound;          // C (f(x) - f_inf) + D
    double margin;         // statistical allowance (0 when exact)
    bool exact;
    bool pass;
};

struct AbcReport {
    std::vector<AbcProbe> probes;
    bool pass = true;
    double min_slack = 0.0;  // min over probes of bound + margin - variance
};

// Checks E||g - grad f||^2 <= C (f - f_inf) + D at each probe point: exactly
// for finite-support oracles, by Monte Carlo with a 4-sigma margin otherwise.
AbcReport verify_abc(const GradientOracle& oracle, double C, double D,
                     const std::vector<Point>& probe_points, int n_samples,
                     const NoiseStream& stream);

struct UnbiasednessReport {
    bool exact;
    double max_abs_error;  // max coordinate deviation of the (exact or sample) mean
    double tolerance;
    bool pass;
};

// Finite-support oracles: exact expectation equals the gradient to 1e-12.
// Sampled oracles: per-coordinate 4-sigma check over n_samples draws.
UnbiasednessReport check_unbiasedness(const GradientOracle& oracle, const Point& x, int n_samples,
                                      const NoiseStream& stream);

struct GrowthWitness {
    double x;
    double second_moment;  // E||g(x)||^2
    double rhs;            // sigma2 + (eta2 + 1) ||grad f(x)||^2
};

// Searches for a witness of E||g||^2 > sigma^2 + (eta^2 + 1) ||grad f||^2,
// refuting the relaxed growth condition for the sign-perturbation families.
// Softplus agents use the closed-form threshold x >= ln(e^(eta2+sigma2) - 1)
// + shift - 1; the huber agent falls back to a log-spaced grid search. Empty
// result means no witness was found (the oracle may satisfy relaxed growth).
std::optional<GrowthWitness> refute_relaxed_growth(const GradientOracle& oracle, double sigma2,
                                                   double eta2);

}  // namespace fedvar
