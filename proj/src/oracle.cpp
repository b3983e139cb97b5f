#include "deo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "deo/errors.hpp"

namespace deo {

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double x : a) s += x * x;
  return std::sqrt(s);
}

double SymMatrix::off_diagonal_frobenius() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) s += (*this)(i, j) * (*this)(i, j);
    }
  }
  return std::sqrt(s);
}

double SymMatrix::max_asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return m;
}

void SymMatrix::symmetrize() {
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = avg;
      (*this)(j, i) = avg;
    }
  }
}

FdHessianResult hessian_fd(const Problem& problem, const Vec& theta, double h,
                           const std::optional<Batch>& batch) {
  const int n = problem.dim();
  if (static_cast<int>(theta.size()) != n) {
    throw std::invalid_argument("hessian_fd: theta dim mismatch");
  }
  if (n > 500) {
    throw std::invalid_argument("hessian_fd: dim > 500 refused");
  }
  if (!(h > 0.0)) throw std::invalid_argument("hessian_fd: h must be > 0");

  SymMatrix m(n);
  Vec probe = theta;
  for (int i = 0; i < n; ++i) {
    const double hi = h * (1.0 + std::abs(theta[static_cast<std::size_t>(i)]));
    probe[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)] + hi;
    const Vec gp = problem.grad(probe, batch);
    probe[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)] - hi;
    const Vec gm = problem.grad(probe, batch);
    probe[static_cast<std::size_t>(i)] = theta[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      const double e = (gp[static_cast<std::size_t>(j)] - gm[static_cast<std::size_t>(j)]) / (2.0 * hi);
      if (!std::isfinite(e)) throw NumericFailure("hessian_fd: non-finite entry");
      m(j, i) = e;  // column i = d(grad)/d(theta_i)
    }
  }
  FdHessianResult res;
  res.asymmetry = m.max_asymmetry();
  m.symmetrize();
  res.hessian = std::move(m);
  return res;
}

namespace {

void fix_sign(Vec& v) {
  for (double x : v) {
    if (x != 0.0) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

}  // namespace

EigenPairs eig_sym(const SymMatrix& h) {
  const int n = h.n;
  if (n < 1) throw std::invalid_argument("eig_sym: empty matrix");
  if (n > 500) throw std::invalid_argument("eig_sym: dim > 500 refused");
  if (h.max_asymmetry() != 0.0) {
    throw std::invalid_argument("eig_sym: matrix must be symmetric");
  }

  SymMatrix a = h;
  std::vector<Vec> vt(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) vt[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;

  const double norm_h = h.frobenius_norm();
  const double target = 1e-10 * norm_h;
  constexpr int kMaxSweeps = 100;

  bool converged = a.off_diagonal_frobenius() <= target;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- J^T A J on rows/columns p, q
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        // accumulate eigenvectors: V <- V J, rows of vt are V columns
        Vec& vp = vt[static_cast<std::size_t>(p)];
        Vec& vq = vt[static_cast<std::size_t>(q)];
        for (int k = 0; k < n; ++k) {
          const double xp = vp[static_cast<std::size_t>(k)];
          const double xq = vq[static_cast<std::size_t>(k)];
          vp[static_cast<std::size_t>(k)] = c * xp - s * xq;
          vq[static_cast<std::size_t>(k)] = s * xp + c * xq;
        }
      }
    }
    converged = a.off_diagonal_frobenius() <= target;
  }
  if (!converged) {
    throw ConvergenceFailure("eig_sym: no convergence after 100 sweeps");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&a](int i, int j) { return a(i, i) < a(j, j); });

  EigenPairs out;
  out.values.reserve(static_cast<std::size_t>(n));
  out.vectors.reserve(static_cast<std::size_t>(n));
  for (int idx : order) {
    out.values.push_back(a(idx, idx));
    Vec v = vt[static_cast<std::size_t>(idx)];
    fix_sign(v);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

double alignment(const Vec& a, const Vec& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) {
    throw std::invalid_argument("alignment: zero vector");
  }
  // Ratio of squares: numerator and denominator round identically when
  // a == b, so self-alignment is exactly 1. Falls back to the norm-product
  // form when the squares would overflow or underflow.
  const double ab = dot(a, b);
  const double num = ab * ab;
  const double den = dot(a, a) * dot(b, b);
  if (std::isfinite(num) && std::isfinite(den) && den > 0.0) {
    return std::min(std::sqrt(num / den), 1.0);
  }
  return std::min(std::abs(ab) / (na * nb), 1.0);
}

}  // namespace deo
