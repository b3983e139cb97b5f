#include "deo/vec.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace deo {

namespace {

void check_same_dim(const Vec& a, const Vec& b, const char* op) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& v) { return std::sqrt(dot(v, v)); }

Vec normalize(const Vec& v) {
  const double n = norm(v);
  if (!(n > 1e-300)) {
    throw std::invalid_argument("normalize: zero vector");
  }
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void axpy(double a, const Vec& x, Vec& y) {
  check_same_dim(x, y, "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec add(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "add");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  check_same_dim(a, b, "sub");
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vec scale(double a, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = a * v[i];
  return out;
}

std::uint64_t Rng::mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::hash_label(std::string_view label) {
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Rng::Rng(std::uint64_t seed, std::string_view label)
    : gen_(mix(seed ^ hash_label(label))) {}

Rng::Rng(std::uint64_t seed, std::string_view label, std::uint64_t sequence)
    : gen_(mix(mix(seed ^ hash_label(label)) + sequence)) {}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = next_uniform();
  while (u1 == 0.0) u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::uint64_t Rng::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be > 0");
  return next_u64() % bound;
}

Vec random_unit_vector(int dim, const RngSeed& seed) {
  if (dim < 1) throw std::invalid_argument("random_unit_vector: dim must be >= 1");
  Rng rng(seed);
  Vec v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rng.next_normal();
  return normalize(v);
}

double cosine_lr(long t, long total, double lr_max, double lr_min,
                 bool* clamped) {
  if (total < 1) throw std::invalid_argument("cosine_lr: total must be >= 1");
  if (t < 0) throw std::invalid_argument("cosine_lr: t must be >= 0");
  if (!(lr_min >= 0.0 && lr_min <= lr_max)) {
    throw std::invalid_argument("cosine_lr: need 0 <= lr_min <= lr_max");
  }
  if (clamped != nullptr) *clamped = (t > total);
  if (t > total) return lr_min;
  const double frac = static_cast<double>(t) / static_cast<double>(total);
  return lr_min +
         0.5 * (lr_max - lr_min) * (1.0 + std::cos(std::numbers::pi * frac));
}

}  // namespace deo
