#include "deo/dimer.hpp"

#include <cmath>
#include <stdexcept>

#include "deo/errors.hpp"

namespace deo {

DimerState DimerState::init_random(int dim, const DimerConfig& config,
                                   std::uint64_t seed) {
  if (!(config.delta_r > 0.0) || !(config.eta_rot > 0.0) || config.alpha < 0.0) {
    throw std::invalid_argument(
        "dimer: need delta_r > 0, eta_rot > 0, alpha >= 0");
  }
  DimerState s;
  s.direction = random_unit_vector(dim, RngSeed{seed, "dimer"});
  s.config = config;
  return s;
}

namespace {

void check_unit(const Vec& direction) {
  const double n = norm(direction);
  if (std::abs(n - 1.0) > 1e-9) {
    throw std::invalid_argument("dimer: direction must be unit norm");
  }
}

}  // namespace

std::pair<DimerState, RotationDiagnostics> rotate_once(
    const Problem& problem, const Vec& theta, const Vec& g,
    const DimerState& state, const std::optional<Batch>& batch) {
  check_unit(state.direction);
  const double dr = state.config.delta_r;
  const Vec& n = state.direction;

  Vec theta2 = theta;
  axpy(dr, n, theta2);

  const double loss_theta = problem.loss(theta, batch);
  const double loss_theta2 = problem.loss(theta2, batch);
  const Vec g2 = problem.grad(theta2, batch);
  if (!std::isfinite(loss_theta) || !std::isfinite(loss_theta2) || !all_finite(g2)) {
    throw NumericFailure("dimer: non-finite probe evaluation");
  }

  Vec diff = sub(g2, g);
  RotationDiagnostics diag;
  const double g_dot_n = dot(g, n);
  diag.curvature_grad = dot(diff, n) / dr;
  diag.curvature_paper = (loss_theta2 - loss_theta) / dr;
  diag.curvature_second_order =
      2.0 * (loss_theta2 - loss_theta - dr * g_dot_n) / (dr * dr);
  diag.loss_at_theta2 = loss_theta2;

  Vec d = (state.config.sign == SignConvention::kForceConvention)
              ? scale(-1.0, diff)
              : std::move(diff);
  const double d_dot_n = dot(d, n);
  Vec fr = d;
  axpy(-d_dot_n, n, fr);
  diag.rotational_force = fr;

  // F_R is orthogonal to N, so ||N + eta F_R|| >= 1 and normalize is safe.
  Vec pre = n;
  axpy(state.config.eta_rot, fr, pre);

  DimerState next;
  next.direction = normalize(pre);
  next.config = state.config;
  next.last_diag = diag;
  return {std::move(next), std::move(diag)};
}

Vec project_gradient(const Vec& g, const Vec& direction, double alpha) {
  check_unit(direction);
  const double c = alpha * dot(g, direction);
  Vec out = g;
  axpy(-c, direction, out);
  return out;
}

}  // namespace deo
