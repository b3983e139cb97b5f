#pragma once

#include <vector>

namespace deo {

/// Dense symmetric matrix, row-major storage.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // n*n entries

  SymMatrix() = default;
  explicit SymMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  double frobenius_norm() const;
  double off_diagonal_frobenius() const;
  double max_asymmetry() const;
  /// (A + A^T) / 2, in place.
  void symmetrize();
};

}  // namespace deo
