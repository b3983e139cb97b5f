#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "deo/problem.hpp"
#include "deo/vec.hpp"

namespace deo {

/// Which direction the gradient difference enters the rotation update.
/// kAsWritten uses d = g2 - g and rotates toward the largest-curvature
/// eigenvector on quadratics; kForceConvention uses d = -(g2 - g) (forces
/// instead of gradients, the molecular-dynamics formulation) and rotates
/// toward the smallest-curvature eigenvector.
enum class SignConvention { kAsWritten, kForceConvention };

struct DimerConfig {
  double delta_r = 6e-3;
  double eta_rot = 1e-3;
  double alpha = 5.0;
  SignConvention sign = SignConvention::kAsWritten;
};

struct RotationDiagnostics {
  Vec rotational_force;           // F_R, orthogonal to the pre-update direction
  double curvature_paper = 0.0;   // (L(theta2) - L(theta)) / dR
  double curvature_grad = 0.0;    // (g2 - g) . N / dR
  double curvature_second_order = 0.0;  // 2 (L(theta2) - L(theta) - dR g.N) / dR^2
  double loss_at_theta2 = 0.0;
};

struct DimerState {
  Vec direction;  // unit norm
  DimerConfig config;
  std::optional<RotationDiagnostics> last_diag;

  static DimerState init_random(int dim, const DimerConfig& config,
                                std::uint64_t seed);
};

/// One rotation update: probes theta2 = theta + dR * N with one extra
/// gradient evaluation (plus two loss evaluations for the curvature
/// diagnostics) and returns the state with the rotated unit direction.
/// `g` must be problem.grad(theta, batch) for the same batch.
std::pair<DimerState, RotationDiagnostics> rotate_once(
    const Problem& problem, const Vec& theta, const Vec& g,
    const DimerState& state, const std::optional<Batch>& batch);

/// g - alpha * (g . direction) * direction. `direction` must be unit norm.
Vec project_gradient(const Vec& g, const Vec& direction, double alpha);

}  // namespace deo
