#pragma once

#include <optional>

namespace deo {

/// One per-step telemetry row. Optional fields render as empty CSV cells:
/// the dimer columns are absent for bare-optimizer runs (and before the
/// first refresh), align_vmin is absent unless the oracle is enabled.
/// Curvature diagnostics are the values from the most recent refresh;
/// g_dot_n is recomputed every step against the direction in use.
struct RunRecord {
  long step = 0;
  double lr = 0.0;
  double loss = 0.0;
  double grad_norm = 0.0;
  std::optional<double> g_dot_n;
  std::optional<double> curv_paper;
  std::optional<double> curv_grad;
  std::optional<double> curv_2nd;
  int dimer_refreshed = 0;
  long grad_evals = 0;  // cumulative
  std::optional<double> align_vmin;
};

}  // namespace deo
