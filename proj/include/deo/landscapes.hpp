#pragma once

#include "deo/problem.hpp"

namespace deo {

/// f(x) = 1/2 sum_i lambda_i x_i^2. Hessian is diag(lambda), constant.
/// Mixed-sign eigenvalues give a clean saddle with known extremal axes.
ProblemPtr make_quadratic(const Vec& lambdas);

/// f(x, y) = x^3 - 3 x y^2. Degenerate saddle at the origin (zero Hessian).
ProblemPtr make_monkey_saddle();

/// Chained Rosenbrock, dim >= 2. Global minimum at all-ones with loss 0.
ProblemPtr make_rosenbrock(int dim);

}  // namespace deo
