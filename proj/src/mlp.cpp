#include "deo/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "deo/errors.hpp"
#include "deo/io.hpp"

namespace deo {

Dataset Dataset::moons(int n, double noise, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("moons: n must be >= 1");
  if (noise < 0.0) throw std::invalid_argument("moons: noise must be >= 0");
  Rng rng(seed, "data");
  Dataset d;
  d.x.reserve(static_cast<std::size_t>(n));
  d.label.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int lab = i % 2;
    const double phi = std::numbers::pi * rng.next_uniform();
    double px, py;
    if (lab == 0) {
      px = std::cos(phi);
      py = std::sin(phi);
    } else {
      px = 1.0 - std::cos(phi);
      py = 0.5 - std::sin(phi);
    }
    px += noise * rng.next_normal();
    py += noise * rng.next_normal();
    d.x.push_back({px, py});
    d.label.push_back(lab);
  }
  return d;
}

void Dataset::save_csv(std::ostream& out) const {
  out << "x1,x2,label\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_double(x[i][0]) << ',' << format_double(x[i][1]) << ','
        << label[i] << '\n';
  }
}

void Dataset::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  save_csv(out);
}

Dataset Dataset::load_csv(std::istream& in) {
  Dataset d;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty file");
  if (line != "x1,x2,label" && line != "x1,x2,label\r") {
    throw std::runtime_error("dataset csv: expected header 'x1,x2,label'");
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string f1, f2, f3;
    if (!std::getline(row, f1, ',') || !std::getline(row, f2, ',') ||
        !std::getline(row, f3)) {
      throw std::runtime_error("dataset csv: malformed row: " + line);
    }
    d.x.push_back({std::stod(f1), std::stod(f2)});
    d.label.push_back(std::stoi(f3));
    if (d.label.back() != 0 && d.label.back() != 1) {
      throw std::runtime_error("dataset csv: label must be 0 or 1");
    }
  }
  if (d.x.empty()) throw std::runtime_error("dataset csv: no rows");
  return d;
}

Dataset Dataset::load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  return load_csv(in);
}

Vec init_params(const MlpShape& shape, const RngSeed& seed) {
  Rng rng(seed);
  Vec p(static_cast<std::size_t>(shape.param_count()), 0.0);
  std::size_t k = 0;
  const double s1 = 1.0 / std::sqrt(static_cast<double>(shape.input));
  for (int i = 0; i < shape.hidden * shape.input; ++i) p[k++] = s1 * rng.next_normal();
  k += static_cast<std::size_t>(shape.hidden);  // b1 stays zero
  const double s2 = 1.0 / std::sqrt(static_cast<double>(shape.hidden));
  for (int i = 0; i < shape.classes * shape.hidden; ++i) p[k++] = s2 * rng.next_normal();
  // b2 stays zero
  return p;
}

std::vector<int> batch_indices(int n, int b, std::int64_t step, std::uint64_t seed) {
  if (n < 1 || b < 1 || b > n) {
    throw std::invalid_argument("batch_indices: need 1 <= b <= n");
  }
  if (step < 0) throw std::invalid_argument("batch_indices: step must be >= 0");
  const std::int64_t per_epoch = (n + b - 1) / b;
  const std::int64_t epoch = step / per_epoch;
  const std::int64_t slot = step % per_epoch;

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed, "perm", static_cast<std::uint64_t>(epoch));
  for (int i = n - 1; i > 0; --i) {
    const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }

  const auto lo = static_cast<std::size_t>(slot * b);
  const auto hi = std::min(static_cast<std::size_t>(n), lo + static_cast<std::size_t>(b));
  return {perm.begin() + static_cast<std::ptrdiff_t>(lo),
          perm.begin() + static_cast<std::ptrdiff_t>(hi)};
}

MlpProblem::MlpProblem(MlpShape shape, Dataset data, int batch_size)
    : Problem("mlp", shape.param_count()),
      shape_(shape),
      data_(std::move(data)),
      batch_size_(batch_size) {
  if (shape_.input != 2) throw std::invalid_argument("mlp: input dim must be 2");
  if (shape_.hidden < 1 || shape_.classes < 2) {
    throw std::invalid_argument("mlp: need hidden >= 1 and classes >= 2");
  }
  if (batch_size_ < 1 || batch_size_ > data_.size()) {
    throw std::invalid_argument("mlp: need 1 <= batch_size <= dataset size");
  }
  all_indices_.resize(static_cast<std::size_t>(data_.size()));
  std::iota(all_indices_.begin(), all_indices_.end(), 0);
}

namespace {

struct Views {
  // Offsets into the flat layout [W1, b1, W2, b2].
  int w1, b1, w2, b2;
};

Views layout(const MlpShape& s) {
  Views v{};
  v.w1 = 0;
  v.b1 = v.w1 + s.hidden * s.input;
  v.w2 = v.b1 + s.hidden;
  v.b2 = v.w2 + s.classes * s.hidden;
  return v;
}

}  // namespace

double MlpProblem::forward_loss(const Vec& params, std::span<const int> idx) const {
  check_dim(params);
  if (idx.empty()) throw std::invalid_argument("mlp: empty batch");
  const Views off = layout(shape_);
  const int h = shape_.hidden, c = shape_.classes;
  std::vector<double> a(static_cast<std::size_t>(h));
  std::vector<double> z(static_cast<std::size_t>(c));
  double total = 0.0;
  for (int row : idx) {
    const auto& pt = data_.x[static_cast<std::size_t>(row)];
    for (int j = 0; j < h; ++j) {
      const double pre = params[static_cast<std::size_t>(off.w1 + 2 * j)] * pt[0] +
                         params[static_cast<std::size_t>(off.w1 + 2 * j + 1)] * pt[1] +
                         params[static_cast<std::size_t>(off.b1 + j)];
      a[static_cast<std::size_t>(j)] = std::tanh(pre);
    }
    double zmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < c; ++k) {
      double s = params[static_cast<std::size_t>(off.b2 + k)];
      for (int j = 0; j < h; ++j) {
        s += params[static_cast<std::size_t>(off.w2 + k * h + j)] * a[static_cast<std::size_t>(j)];
      }
      z[static_cast<std::size_t>(k)] = s;
      zmax = std::max(zmax, s);
    }
    double denom = 0.0;
    for (int k = 0; k < c; ++k) denom += std::exp(z[static_cast<std::size_t>(k)] - zmax);
    const int y = data_.label[static_cast<std::size_t>(row)];
    total += -(z[static_cast<std::size_t>(y)] - zmax - std::log(denom));
  }
  const double out = total / static_cast<double>(idx.size());
  if (!std::isfinite(out)) throw NumericFailure("mlp: non-finite loss");
  return out;
}

Vec MlpProblem::backward(const Vec& params, std::span<const int> idx) const {
  check_dim(params);
  if (idx.empty()) throw std::invalid_argument("mlp: empty batch");
  const Views off = layout(shape_);
  const int h = shape_.hidden, c = shape_.classes;
  Vec g(params.size(), 0.0);
  std::vector<double> a(static_cast<std::size_t>(h));
  std::vector<double> z(static_cast<std::size_t>(c));
  std::vector<double> p(static_cast<std::size_t>(c));
  std::vector<double> da(static_cast<std::size_t>(h));
  const double inv_b = 1.0 / static_cast<double>(idx.size());
  for (int row : idx) {
    const auto& pt = data_.x[static_cast<std::size_t>(row)];
    for (int j = 0; j < h; ++j) {
      const double pre = params[static_cast<std::size_t>(off.w1 + 2 * j)] * pt[0] +
                         params[static_cast<std::size_t>(off.w1 + 2 * j + 1)] * pt[1] +
                         params[static_cast<std::size_t>(off.b1 + j)];
      a[static_cast<std::size_t>(j)] = std::tanh(pre);
    }
    double zmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < c; ++k) {
      double s = params[static_cast<std::size_t>(off.b2 + k)];
      for (int j = 0; j < h; ++j) {
        s += params[static_cast<std::size_t>(off.w2 + k * h + j)] * a[static_cast<std::size_t>(j)];
      }
      z[static_cast<std::size_t>(k)] = s;
      zmax = std::max(zmax, s);
    }
    double denom = 0.0;
    for (int k = 0; k < c; ++k) {
      p[static_cast<std::size_t>(k)] = std::exp(z[static_cast<std::size_t>(k)] - zmax);
      denom += p[static_cast<std::size_t>(k)];
    }
    const int y = data_.label[static_cast<std::size_t>(row)];
    std::fill(da.begin(), da.end(), 0.0);
    for (int k = 0; k < c; ++k) {
      double dz = p[static_cast<std::size_t>(k)] / denom;
      if (k == y) dz -= 1.0;
      dz *= inv_b;
      g[static_cast<std::size_t>(off.b2 + k)] += dz;
      for (int j = 0; j < h; ++j) {
        g[static_cast<std::size_t>(off.w2 + k * h + j)] += dz * a[static_cast<std::size_t>(j)];
        da[static_cast<std::size_t>(j)] +=
            dz * params[static_cast<std::size_t>(off.w2 + k * h + j)];
      }
    }
    for (int j = 0; j < h; ++j) {
      const double aj = a[static_cast<std::size_t>(j)];
      const double dpre = da[static_cast<std::size_t>(j)] * (1.0 - aj * aj);
      g[static_cast<std::size_t>(off.w1 + 2 * j)] += dpre * pt[0];
      g[static_cast<std::size_t>(off.w1 + 2 * j + 1)] += dpre * pt[1];
      g[static_cast<std::size_t>(off.b1 + j)] += dpre;
    }
  }
  if (!all_finite(g)) throw NumericFailure("mlp: non-finite gradient");
  return g;
}

int MlpProblem::predict(const Vec& params, const std::array<double, 2>& point) const {
  check_dim(params);
  const Views off = layout(shape_);
  const int h = shape_.hidden, c = shape_.classes;
  std::vector<double> a(static_cast<std::size_t>(h));
  for (int j = 0; j < h; ++j) {
    const double pre = params[static_cast<std::size_t>(off.w1 + 2 * j)] * point[0] +
                       params[static_cast<std::size_t>(off.w1 + 2 * j + 1)] * point[1] +
                       params[static_cast<std::size_t>(off.b1 + j)];
    a[static_cast<std::size_t>(j)] = std::tanh(pre);
  }
  int best = 0;
  double best_z = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < c; ++k) {
    double s = params[static_cast<std::size_t>(off.b2 + k)];
    for (int j = 0; j < h; ++j) {
      s += params[static_cast<std::size_t>(off.w2 + k * h + j)] * a[static_cast<std::size_t>(j)];
    }
    if (s > best_z) {
      best_z = s;
      best = k;
    }
  }
  return best;
}

std::vector<int> MlpProblem::select(const std::optional<Batch>& batch) const {
  if (!batch.has_value()) return all_indices_;
  return batch_indices(data_.size(), batch_size_, batch->step, batch->seed);
}

double MlpProblem::loss(const Vec& theta, const std::optional<Batch>& batch) const {
  const auto idx = select(batch);
  return forward_loss(theta, idx);
}

Vec MlpProblem::grad(const Vec& theta, const std::optional<Batch>& batch) const {
  const auto idx = select(batch);
  return backward(theta, idx);
}

ProblemPtr make_mlp(MlpShape shape, Dataset data, int batch_size) {
  return std::make_shared<MlpProblem>(shape, std::move(data), batch_size);
}

}  // namespace deo
