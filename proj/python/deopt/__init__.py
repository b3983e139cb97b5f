"""Dimer-guided optimization: curvature-direction estimation for SGD/Adam/AdamW.

Thin convenience layer over the compiled core. `run` and `compare` return
the per-step CSV telemetry together with the parsed JSON summary.
"""

import json

from ._core import (  # noqa: F401
    NEVER_REFRESH,
    AdamConfig,
    AdamState,
    ConfigError,
    ConvergenceFailure,
    DimerConfig,
    DimerState,
    NumericFailure,
    Problem,
    RotationDiagnostics,
    RunConfig,
    SignConvention,
    __version__,
    adam_step,
    adamw_step,
    alignment,
    compare_strings,
    cosine_lr,
    dot,
    eig_sym,
    hessian_fd,
    init_params,
    mlp_moons,
    monkey_saddle,
    moons_csv,
    norm,
    normalize,
    project_gradient,
    quadratic,
    random_unit_vector,
    rosenbrock,
    rotate_once,
    run_strings,
    sgd_step,
)


def run(config):
    """Execute one seeded run; returns (csv_text, summary_dict)."""
    csv_text, summary = run_strings(config)
    return csv_text, json.loads(summary)


def compare(configs):
    """Execute shared-seed runs; returns (merged_csv_text, summary_dict)."""
    csv_text, summary = compare_strings(list(configs))
    return csv_text, json.loads(summary)
