#pragma once

// Test-only reference implementations: finite differences, brute-force
// enumeration, and a plain single-loop SGD. Kept independent of the library
// code paths they cross-check.

#include <cmath>
#include <functional>
#include <vector>

#include "fedvar/objective.hpp"
#include "fedvar/oracle.hpp"
#include "fedvar/rng.hpp"

namespace testsupport {

// Central finite difference of a 1-D objective.
inline double central_diff(const fedvar::Objective& obj, double x, double h = 1e-6) {
    const fedvar::Point lo{x - h};
    const fedvar::Point hi{x + h};
    return (obj.value(hi) - obj.value(lo)) / (2.0 * h);
}

inline std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> xs(n);
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) xs[i] = lo + h * i;
    return xs;
}

// Mean and E||.||^2 over an enumerated support, computed directly.
struct EnumeratedMoments {
    fedvar::Point mean;
    double second_moment;
    double variance;  // E||g - E g||^2
};

inline EnumeratedMoments enumerate_moments(const fedvar::GradientOracle& oracle,
                                           const fedvar::Point& x) {
    const auto atoms = oracle.support(std::span<const double>(x));
    fedvar::Point mean(x.size(), 0.0);
    double sm = 0.0;
    for (const auto& a : atoms) {
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += a.prob * a.grad[j];
        sm += a.prob * fedvar::norm_sq(std::span<const double>(a.grad));
    }
    double var = 0.0;
    for (const auto& a : atoms) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < mean.size(); ++j) {
            const double d = a.grad[j] - mean[j];
            d2 += d * d;
        }
        var += a.prob * d2;
    }
    return {std::move(mean), sm, var};
}

// Plain single-loop SGD x <- x - alpha g(x), sharing the library's stream
// coordinates for the n = 1, Q = 1 reduction check.
inline fedvar::Point reference_sgd(const fedvar::GradientOracle& oracle, fedvar::Point x,
                                   double alpha, std::int64_t steps,
                                   const fedvar::NoiseStream& stream) {
    fedvar::Point g(x.size());
    for (std::int64_t t = 0; t < steps; ++t) {
        const auto draw = stream.at(static_cast<std::uint64_t>(t), 0, 0);
        oracle.sample(std::span<const double>(x), std::span<double>(g), draw);
        for (std::size_t j = 0; j < x.size(); ++j) x[j] -= alpha * g[j];
    }
    return x;
}

// Deterministic (full-gradient) local descent, the brute-force oracle for the
// drift measure.
inline fedvar::Point local_gd(const fedvar::Objective& obj, fedvar::Point x, double eta,
                              int steps) {
    fedvar::Point g(x.size());
    for (int q = 0; q < steps; ++q) {
        obj.gradient(std::span<const double>(x), std::span<double>(g));
        for (std::size_t j = 0; j < x.size(); ++j) x[j] -= eta * g[j];
    }
    return x;
}

}  // namespace testsupport
