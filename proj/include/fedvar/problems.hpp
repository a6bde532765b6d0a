#pragma once

#include "fedvar/problem.hpp"

namespace fedvar {

// n-agent heterogeneous suite: agent 1 is the Huber loss at 0 with the
// sqrt(|x|) sign-perturbation oracle, agents 2..n are softplus with shifts
// 2..n and sqrt(f_i(x)) perturbations. Every oracle satisfies the variance
// envelope with C = 1, D = 1 and violates relaxed growth.
FederatedProblem make_softplus_suite(int n = 16, double f_star_tol = 1e-10);

// Two-agent pair f_1(x) = x^2, f_2 = Huber at d, with the same
// sign-perturbation construction (magnitudes sqrt(f_1(x)) and sqrt(|x - d|)).
// sigma_f* grows linearly in |d| while the BGD estimate stays put.
FederatedProblem make_quadratic_huber_pair(double d, double f_star_tol = 1e-10);

// Same pair with exact (zero-noise) oracles.
FederatedProblem make_quadratic_huber_pair_exact(double d, double f_star_tol = 1e-10);

// n identical quadratics (a/2)(x - c)^2 with exact oracles; sigma_f* = 0.
FederatedProblem make_identical_quadratics(int n, double a, double c);

}  // namespace fedvar
