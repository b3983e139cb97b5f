#pragma once

#include <limits>
#include <optional>
#include <utility>

#include "deo/dimer.hpp"
#include "deo/problem.hpp"
#include "deo/record.hpp"
#include "deo/vec.hpp"

namespace deo {

struct SgdConfig {
  double momentum = 0.0;  // 0 = plain SGD
};

struct SgdState {
  SgdConfig config;
  Vec velocity;  // allocated on first use when momentum > 0
};

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.95;
  double epsilon = 1e-8;
  double weight_decay = 0.1;  // AdamW only
};

struct AdamState {
  Vec m;
  Vec v;  // elementwise second moment, stays >= 0
  long t = 0;

  static AdamState zeros(int dim);
};

enum class BaseOpt { kSgd, kAdam, kAdamW };

/// Sentinel frequency: the cached direction is never refreshed.
inline constexpr long kNeverRefresh = std::numeric_limits<long>::max();

struct DeoConfig {
  long frequency = 10;  // refresh every f steps; kNeverRefresh = never
  DimerConfig dimer;
  BaseOpt base = BaseOpt::kAdam;
  /// Steps are numbered from 1 and the expensive branch fires at
  /// t mod f = 0, so the first refresh lands at t = f. This flag makes
  /// step 1 expensive as well.
  bool refresh_at_start = false;
};

/// Per-run mutable optimizer state for whichever base is configured.
struct OptState {
  SgdState sgd;
  AdamState adam;
};

/// Cosine decay from lr_max to lr_min over `total_steps`, evaluated with
/// the 1-based step index (step 1 gets lr_max).
struct LrSchedule {
  double lr_max = 6e-4;
  double lr_min = 0.0;
  long total_steps = 1;

  double at(long step_1based) const;
};

Vec sgd_step(const Vec& theta, const Vec& g_mod, double lr, SgdState& state);

/// Dispatch one step of the configured base optimizer, mutating the
/// matching part of `opt` in place.
Vec apply_base(BaseOpt base, const Vec& theta, const Vec& g_mod, double lr,
               OptState& opt, const AdamConfig& adam_cfg);

std::pair<Vec, AdamState> adam_step(const Vec& theta, const Vec& g_mod, double lr,
                                    const AdamState& state, const AdamConfig& cfg);
std::pair<Vec, AdamState> adamw_step(const Vec& theta, const Vec& g_mod, double lr,
                                     const AdamState& state, const AdamConfig& cfg);

struct DeoStepResult {
  Vec theta;
  DimerState dimer;
  OptState opt;
  RunRecord record;
};

/// One wrapped optimization step (t is 1-based). Evaluates exactly one
/// base gradient; on refresh steps additionally runs rotate_once (one
/// extra gradient, two loss evaluations) and applies the correction with
/// the freshly rotated direction. The returned record carries cumulative
/// gradient-evaluation accounting continued from `grad_evals_before`.
DeoStepResult deo_step(const Problem& problem, const Vec& theta, long t,
                       const DeoConfig& deo, const DimerState& dimer_state,
                       const OptState& opt_state, const AdamConfig& adam_cfg,
                       const LrSchedule& schedule,
                       const std::optional<Batch>& batch,
                       long grad_evals_before);

}  // namespace deo
