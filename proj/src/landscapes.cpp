#include "deo/landscapes.hpp"

#include <cmath>
#include <stdexcept>

namespace deo {

namespace {

class Quadratic final : public Problem {
 public:
  explicit Quadratic(Vec lambdas)
      : Problem("quadratic", static_cast<int>(lambdas.size())),
        lambdas_(std::move(lambdas)) {
    for (double l : lambdas_) {
      if (!std::isfinite(l)) {
        throw std::invalid_argument("quadratic: eigenvalues must be finite");
      }
    }
  }

  double loss(const Vec& x, const std::optional<Batch>&) const override {
    check_dim(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += lambdas_[i] * x[i] * x[i];
    return 0.5 * s;
  }

  Vec grad(const Vec& x, const std::optional<Batch>&) const override {
    check_dim(x);
    Vec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = lambdas_[i] * x[i];
    return g;
  }

  bool has_hessian() const override { return true; }

  SymMatrix hessian(const Vec& x) const override {
    check_dim(x);
    SymMatrix h(dim());
    for (int i = 0; i < dim(); ++i) h(i, i) = lambdas_[static_cast<std::size_t>(i)];
    return h;
  }

 private:
  Vec lambdas_;
};

class MonkeySaddle final : public Problem {
 public:
  MonkeySaddle() : Problem("monkey", 2) {}

  double loss(const Vec& p, const std::optional<Batch>&) const override {
    check_dim(p);
    const double x = p[0], y = p[1];
    return x * x * x - 3.0 * x * y * y;
  }

  Vec grad(const Vec& p, const std::optional<Batch>&) const override {
    check_dim(p);
    const double x = p[0], y = p[1];
    return {3.0 * x * x - 3.0 * y * y, -6.0 * x * y};
  }

  bool has_hessian() const override { return true; }

  SymMatrix hessian(const Vec& p) const override {
    check_dim(p);
    const double x = p[0], y = p[1];
    SymMatrix h(2);
    h(0, 0) = 6.0 * x;
    h(0, 1) = h(1, 0) = -6.0 * y;
    h(1, 1) = -6.0 * x;
    return h;
  }
};

class Rosenbrock final : public Problem {
 public:
  explicit Rosenbrock(int dim) : Problem("rosenbrock", dim) {
    if (dim < 2) throw std::invalid_argument("rosenbrock: dim must be >= 2");
  }

  double loss(const Vec& x, const std::optional<Batch>&) const override {
    check_dim(x);
    double s = 0.0;
    for (int i = 0; i + 1 < dim(); ++i) {
      const double a = 1.0 - x[i];
      const double b = x[i + 1] - x[i] * x[i];
      s += a * a + 100.0 * b * b;
    }
    return s;
  }

  Vec grad(const Vec& x, const std::optional<Batch>&) const override {
    check_dim(x);
    Vec g(x.size(), 0.0);
    for (int i = 0; i + 1 < dim(); ++i) {
      const double b = x[i + 1] - x[i] * x[i];
      g[i] += -2.0 * (1.0 - x[i]) - 400.0 * x[i] * b;
      g[i + 1] += 200.0 * b;
    }
    return g;
  }

  bool has_hessian() const override { return true; }

  // Tridiagonal: d2f/dxi2 = 2 + 1200 xi^2 - 400 x_{i+1} (+200 when i > 0),
  // d2f/dxi dx_{i+1} = -400 xi.
  SymMatrix hessian(const Vec& x) const override {
    check_dim(x);
    SymMatrix h(dim());
    for (int i = 0; i + 1 < dim(); ++i) {
      h(i, i) += 2.0 + 1200.0 * x[i] * x[i] - 400.0 * x[i + 1];
      h(i + 1, i + 1) += 200.0;
      h(i, i + 1) += -400.0 * x[i];
      h(i + 1, i) += -400.0 * x[i];
    }
    return h;
  }
};

}  // namespace

ProblemPtr make_quadratic(const Vec& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("quadratic: need >= 1 eigenvalue");
  return std::make_shared<Quadratic>(lambdas);
}

ProblemPtr make_monkey_saddle() { return std::make_shared<MonkeySaddle>(); }

ProblemPtr make_rosenbrock(int dim) { return std::make_shared<Rosenbrock>(dim); }

}  // namespace deo
