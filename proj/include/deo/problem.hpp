#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "deo/sym_matrix.hpp"
#include "deo/vec.hpp"

namespace deo {

/// Identifies the minibatch used for one stochastic evaluation. Problems
/// that are deterministic ignore it. `step` selects the slot within the
/// epoch-cycling schedule derived from `seed`.
struct Batch {
  std::uint64_t seed = 0;
  std::int64_t step = 0;
};

/// Evaluable loss surface. Evaluation is pure: identical (theta, batch)
/// always produce identical outputs. std::nullopt means "full data" /
/// deterministic evaluation.
class Problem {
 public:
  virtual ~Problem() = default;

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  virtual double loss(const Vec& theta, const std::optional<Batch>& batch) const = 0;
  virtual Vec grad(const Vec& theta, const std::optional<Batch>& batch) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual SymMatrix hessian(const Vec& /*theta*/) const {
    throw std::logic_error("problem '" + name_ + "' has no analytic hessian");
  }

 protected:
  Problem(std::string name, int dim) : name_(std::move(name)), dim_(dim) {
    if (dim < 1) throw std::invalid_argument("Problem: dim must be >= 1");
  }
  void check_dim(const Vec& theta) const {
    if (static_cast<int>(theta.size()) != dim_) {
      throw std::invalid_argument("problem '" + name_ + "': theta has dim " +
                                  std::to_string(theta.size()) + ", expected " +
                                  std::to_string(dim_));
    }
  }

 private:
  std::string name_;
  int dim_;
};

using ProblemPtr = std::shared_ptr<const Problem>;

}  // namespace deo
