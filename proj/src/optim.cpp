#include "deo/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "deo/errors.hpp"

namespace deo {

AdamState AdamState::zeros(int dim) {
  AdamState s;
  s.m.assign(static_cast<std::size_t>(dim), 0.0);
  s.v.assign(static_cast<std::size_t>(dim), 0.0);
  s.t = 0;
  return s;
}

double LrSchedule::at(long step_1based) const {
  return cosine_lr(step_1based - 1, total_steps, lr_max, lr_min);
}

Vec sgd_step(const Vec& theta, const Vec& g_mod, double lr, SgdState& state) {
  if (theta.size() != g_mod.size()) {
    throw std::invalid_argument("sgd_step: dimension mismatch");
  }
  Vec out = theta;
  if (state.config.momentum > 0.0) {
    if (state.velocity.empty()) state.velocity.assign(theta.size(), 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      state.velocity[i] = state.config.momentum * state.velocity[i] + g_mod[i];
      out[i] -= lr * state.velocity[i];
    }
  } else {
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] -= lr * g_mod[i];
  }
  if (!all_finite(out)) throw NumericFailure("sgd_step: non-finite parameters");
  return out;
}

std::pair<Vec, AdamState> adam_step(const Vec& theta, const Vec& g_mod, double lr,
                                    const AdamState& state, const AdamConfig& cfg) {
  if (theta.size() != g_mod.size() || theta.size() != state.m.size() ||
      theta.size() != state.v.size()) {
    throw std::invalid_argument("adam_step: dimension mismatch");
  }
  AdamState next = state;
  next.t = state.t + 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(next.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(next.t));
  Vec out = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    next.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g_mod[i];
    next.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g_mod[i] * g_mod[i];
    const double m_hat = next.m[i] / bc1;
    const double v_hat = next.v[i] / bc2;
    out[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }
  if (!all_finite(out)) throw NumericFailure("adam_step: non-finite parameters");
  return {std::move(out), std::move(next)};
}

std::pair<Vec, AdamState> adamw_step(const Vec& theta, const Vec& g_mod, double lr,
                                     const AdamState& state, const AdamConfig& cfg) {
  auto [out, next] = adam_step(theta, g_mod, lr, state, cfg);
  if (cfg.weight_decay != 0.0) {
    // decoupled decay, applied against the pre-step parameters
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] -= lr * cfg.weight_decay * theta[i];
    }
    if (!all_finite(out)) throw NumericFailure("adamw_step: non-finite parameters");
  }
  return {std::move(out), std::move(next)};
}

Vec apply_base(BaseOpt base, const Vec& theta, const Vec& g_mod, double lr,
               OptState& opt, const AdamConfig& adam_cfg) {
  switch (base) {
    case BaseOpt::kSgd:
      return sgd_step(theta, g_mod, lr, opt.sgd);
    case BaseOpt::kAdam: {
      auto [out, next] = adam_step(theta, g_mod, lr, opt.adam, adam_cfg);
      opt.adam = std::move(next);
      return out;
    }
    case BaseOpt::kAdamW: {
      auto [out, next] = adamw_step(theta, g_mod, lr, opt.adam, adam_cfg);
      opt.adam = std::move(next);
      return out;
    }
  }
  throw std::logic_error("apply_base: unknown optimizer");
}

DeoStepResult deo_step(const Problem& problem, const Vec& theta, long t,
                       const DeoConfig& deo, const DimerState& dimer_state,
                       const OptState& opt_state, const AdamConfig& adam_cfg,
                       const LrSchedule& schedule,
                       const std::optional<Batch>& batch,
                       long grad_evals_before) {
  if (t < 1) throw std::invalid_argument("deo_step: t must be >= 1");
  if (deo.frequency < 1) throw std::invalid_argument("deo_step: frequency must be >= 1");

  DeoStepResult res;
  res.dimer = dimer_state;
  res.opt = opt_state;

  RunRecord& rec = res.record;
  rec.step = t;
  rec.lr = schedule.at(t);
  rec.grad_evals = grad_evals_before;

  const double loss = problem.loss(theta, batch);
  Vec g = problem.grad(theta, batch);
  rec.grad_evals += 1;
  if (!std::isfinite(loss) || !all_finite(g)) {
    throw NumericFailure("deo_step: non-finite evaluation", t);
  }
  rec.loss = loss;
  rec.grad_norm = norm(g);

  const bool refresh = (t % deo.frequency == 0) || (deo.refresh_at_start && t == 1);
  if (refresh) {
    auto [next_dimer, diag] = rotate_once(problem, theta, g, res.dimer, batch);
    res.dimer = std::move(next_dimer);
    rec.grad_evals += 1;
    rec.dimer_refreshed = 1;
  }
  if (res.dimer.last_diag.has_value()) {
    const RotationDiagnostics& d = *res.dimer.last_diag;
    rec.curv_paper = d.curvature_paper;
    rec.curv_grad = d.curvature_grad;
    rec.curv_2nd = d.curvature_second_order;
  }
  rec.g_dot_n = dot(g, res.dimer.direction);

  const Vec g_mod = project_gradient(g, res.dimer.direction, deo.dimer.alpha);
  res.theta = apply_base(deo.base, theta, g_mod, rec.lr, res.opt, adam_cfg);
  return res;
}

}  // namespace deo
