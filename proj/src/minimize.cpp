#include "fedvar/minimize.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace fedvar {

namespace {

constexpr double kInvGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

struct GoldenResult {
    double x;
    double value;
    double width;
};

// Golden-section search on [a, b]; returns the best point seen and the final
// interval width.
GoldenResult golden_min(const Objective& obj, double a, double b, int iters) {
    auto eval = [&](double x) {
        const Point p{x};
        return obj.value(p);
    };
    double c = b - kInvGolden * (b - a);
    double d = a + kInvGolden * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    double best = fc < fd ? fc : fd;
    double best_x = fc < fd ? c : d;
    for (int i = 0;
         i < iters &&
         (b - a) > std::numeric_limits<double>::epsilon() * (1.0 + std::abs(a) + std::abs(b));
         ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvGolden * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvGolden * (b - a);
            fd = eval(d);
        }
        if (fc < best) {
            best = fc;
            best_x = c;
        }
        if (fd < best) {
            best = fd;
            best_x = d;
        }
    }
    return {best_x, best, b - a};
}

}  // namespace

MinimizerResult certified_minimizer(const Objective& obj, Bracket bracket, double tol,
                                    int grid_points, int golden_iters) {
    if (obj.dimension() != 1)
        throw std::invalid_argument("certified_infimum requires a 1-D objective");
    if (!(bracket.lo < bracket.hi)) throw std::invalid_argument("empty bracket");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (grid_points < 3) throw std::invalid_argument("grid too coarse");

    const int n = grid_points;
    const double h = (bracket.hi - bracket.lo) / static_cast<double>(n - 1);
    std::vector<double> vals(n);
    int best_idx = 0;
    for (int i = 0; i < n; ++i) {
        const Point p{bracket.lo + h * i};
        vals[i] = obj.value(p);
        if (vals[i] < vals[best_idx]) best_idx = i;
    }
    if (best_idx == 0 || best_idx == n - 1)
        throw CertificationError("grid minimum on bracket edge; minimizer may lie outside [" +
                                 std::to_string(bracket.lo) + ", " + std::to_string(bracket.hi) +
                                 "]");

    double best = vals[best_idx];
    double best_x = bracket.lo + h * best_idx;
    double width = bracket.hi - bracket.lo;
    // Refine every interior local grid minimum; piecewise-convex objectives can
    // have several.
    for (int i = 1; i + 1 < n; ++i) {
        if (vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1]) {
            const double a = bracket.lo + h * (i - 1);
            const double b = bracket.lo + h * (i + 1);
            const GoldenResult r = golden_min(obj, a, b, golden_iters);
            if (r.value < best) {
                best = r.value;
                best_x = r.x;
                width = r.width;
            } else if (i == best_idx && r.width < width) {
                width = r.width;
            }
        }
    }

    // Smoothness-based residual over the final interval plus roundoff.
    const double err = 0.5 * obj.smoothness() * width * width +
                       8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(best));
    if (err > tol)
        throw CertificationError("bracket exhausted without reaching tolerance (residual " +
                                 std::to_string(err) + " > " + std::to_string(tol) + ")");
    return {best_x, best};
}

double certified_infimum(const Objective& obj, Bracket bracket, double tol, int grid_points,
                         int golden_iters) {
    return certified_minimizer(obj, bracket, tol, grid_points, golden_iters).value;
}

}  // namespace fedvar
