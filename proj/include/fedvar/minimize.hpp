#pragma once

#include <stdexcept>

#include "fedvar/objective.hpp"

namespace fedvar {

struct Bracket {
    double lo;
    double hi;
};

// Raised when an infimum cannot be certified to the requested tolerance
// inside the given bracket (e.g. the grid minimum sits on the bracket edge).
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MinimizerResult {
    double x;
    double value;
};

// Certified infimum of a 1-D objective: a uniform grid localizes candidate
// minima, golden-section refines each bracketed one. Returns f_hat with
// |f_hat - f*| <= tol, else throws CertificationError.
double certified_infimum(const Objective& obj, Bracket bracket, double tol,
                         int grid_points = 10000, int golden_iters = 200);

// Same search, also reporting where the best value was found.
MinimizerResult certified_minimizer(const Objective& obj, Bracket bracket, double tol,
                                    int grid_points = 10000, int golden_iters = 200);

}  // namespace fedvar
