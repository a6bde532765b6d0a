#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fedvar {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_sq(std::span<const double> a) { return dot(a, a); }

inline double norm(std::span<const double> a) { return std::sqrt(norm_sq(a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void fill(std::span<double> x, double v) {
    for (auto& e : x) e = v;
}

inline void copy_into(std::span<const double> src, std::span<double> dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
}

inline bool all_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace fedvar
