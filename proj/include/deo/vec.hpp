#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace deo {

/// Flat parameter vector. All arithmetic is IEEE double.
using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
Vec normalize(const Vec& v);
bool all_finite(const Vec& v);

/// y += a * x
void axpy(double a, const Vec& x, Vec& y);
Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(double a, const Vec& v);

/// Identifies one deterministic random stream. Identical (seed, label)
/// pairs replay the identical sequence; distinct labels give independent
/// streams off the same user-facing seed.
struct RngSeed {
  std::uint64_t seed = 0;
  std::string label;
};

/// Deterministic random stream.
///
/// The generator is std::mt19937_64, whose integer output sequence is
/// pinned by the C++ standard, seeded with splitmix64(seed ^ fnv1a(label))
/// so that streams with different labels are decorrelated. Uniform doubles
/// take the top 53 bits of one draw; normals come from Box-Muller on those
/// uniforms. Bounded integers use modulo reduction (the bias is irrelevant
/// at the sizes used here and the result is reproducible everywhere).
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view label);
  Rng(std::uint64_t seed, std::string_view label, std::uint64_t sequence);
  explicit Rng(const RngSeed& s) : Rng(s.seed, s.label) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53-bit resolution.
  double next_uniform();
  /// Standard normal (Box-Muller; pairs are generated together).
  double next_normal();
  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound);

  static std::uint64_t mix(std::uint64_t x);
  static std::uint64_t hash_label(std::string_view label);

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

Vec random_unit_vector(int dim, const RngSeed& seed);

/// lr_min + (lr_max - lr_min) * (1 + cos(pi t / total)) / 2, clamped to
/// lr_min past the end. `clamped`, when given, reports whether t > total.
double cosine_lr(long t, long total, double lr_max, double lr_min,
                 bool* clamped = nullptr);

}  // namespace deo
