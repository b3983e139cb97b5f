#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "deo/problem.hpp"
#include "deo/vec.hpp"

namespace deo {

/// Two-layer tanh classifier shape. Flat parameter layout is
/// [W1 (hidden x input, row-major), b1, W2 (classes x hidden, row-major), b2].
struct MlpShape {
  int input = 2;
  int hidden = 16;
  int classes = 2;

  int param_count() const {
    return input * hidden + hidden + hidden * classes + classes;
  }
};

/// Labeled 2-D points. Regenerating with the same seed reproduces the
/// points bit-for-bit.
struct Dataset {
  std::vector<std::array<double, 2>> x;
  std::vector<int> label;

  int size() const { return static_cast<int>(x.size()); }

  /// Two interleaved noisy half-moons; labels alternate so counts are
  /// balanced to within one.
  static Dataset moons(int n, double noise, std::uint64_t seed);

  void save_csv(std::ostream& out) const;
  void save_csv(const std::string& path) const;
  static Dataset load_csv(std::istream& in);
  static Dataset load_csv(const std::string& path);
};

/// Weights ~ N(0, 1/fan_in), biases zero. Deterministic per seed.
Vec init_params(const MlpShape& shape, const RngSeed& seed);

/// Deterministic epoch-cycling minibatches: each epoch is a fresh seeded
/// permutation of [0, n) cut into ceil(n/b) consecutive slices (the last
/// one short when b does not divide n). `step` counts batches from 0.
std::vector<int> batch_indices(int n, int b, std::int64_t step, std::uint64_t seed);

class MlpProblem final : public Problem {
 public:
  MlpProblem(MlpShape shape, Dataset data, int batch_size);

  const MlpShape& shape() const { return shape_; }
  const Dataset& data() const { return data_; }
  int batch_size() const { return batch_size_; }

  /// Mean softmax cross-entropy over the given points.
  double forward_loss(const Vec& params, std::span<const int> idx) const;
  /// Exact gradient of forward_loss.
  Vec backward(const Vec& params, std::span<const int> idx) const;
  int predict(const Vec& params, const std::array<double, 2>& point) const;

  double loss(const Vec& theta, const std::optional<Batch>& batch) const override;
  Vec grad(const Vec& theta, const std::optional<Batch>& batch) const override;

 private:
  std::vector<int> select(const std::optional<Batch>& batch) const;

  MlpShape shape_;
  Dataset data_;
  int batch_size_;
  std::vector<int> all_indices_;
};

ProblemPtr make_mlp(MlpShape shape, Dataset data, int batch_size);

}  // namespace deo
