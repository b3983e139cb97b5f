#pragma once

#include <optional>
#include <vector>

#include "deo/problem.hpp"
#include "deo/sym_matrix.hpp"
#include "deo/vec.hpp"

namespace deo {

struct FdHessianResult {
  SymMatrix hessian;        // symmetrized, (A + A^T) / 2
  double asymmetry = 0.0;   // max |A[i][j] - A[j][i]| before symmetrization
};

/// Central-difference Hessian from gradients: column i uses step
/// h_i = h * (1 + |theta_i|). Refuses dim > 500.
FdHessianResult hessian_fd(const Problem& problem, const Vec& theta,
                           double h = 1e-5,
                           const std::optional<Batch>& batch = std::nullopt);

struct EigenPairs {
  Vec values;                // ascending
  std::vector<Vec> vectors;  // orthonormal, vectors[i] pairs with values[i];
                             // first nonzero component made positive
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices (n <= 500).
/// Converged when the off-diagonal Frobenius norm drops below
/// 1e-10 * ||H||_F; throws ConvergenceFailure after 100 sweeps.
EigenPairs eig_sym(const SymMatrix& h);

/// |a.b| / (||a|| ||b||), in [0, 1]. Direction lines, so sign-insensitive.
double alignment(const Vec& a, const Vec& b);

}  // namespace deo
