"""Smoke tests for the deopt extension module.

Run via ctest (test name "python_smoke") with PYTHONPATH pointing at the
staged build-tree package, or manually:

    PYTHONPATH=build/python python -m pytest tests/python -q
"""

import json
import math
import os
from pathlib import Path

import pytest

import deopt

HEADER = (
    "step,optimizer,lr,loss,grad_norm,g_dot_n,curv_paper,curv_grad,"
    "curv_2nd,dimer_refreshed,grad_evals,align_vmin"
)


def schema_path():
    env = os.environ.get("DEO_SCHEMA_DIR")
    if env:
        return Path(env) / "summary.schema.json"
    return Path(__file__).resolve().parents[2] / "schema" / "summary.schema.json"


def validate_summary(summary):
    jsonschema = pytest.importorskip("jsonschema")
    schema = json.loads(schema_path().read_text())
    jsonschema.validate(instance=summary, schema=schema)


def test_version():
    assert isinstance(deopt.__version__, str)
    assert deopt.__version__


def test_landscape_values():
    rb = deopt.rosenbrock(2)
    assert rb.dim == 2
    assert rb.loss([1.0, 1.0]) == 0.0
    assert rb.grad([1.0, 1.0]) == [0.0, 0.0]
    assert rb.loss([0.0, 0.0]) == 1.0
    assert rb.has_hessian()
    h = rb.hessian([1.0, 1.0])
    assert h == [[802.0, -400.0], [-400.0, 200.0]]

    quad = deopt.quadratic([1.0, 2.0, -1.0])
    assert quad.loss([1.0, 1.0, 1.0]) == 1.0  # (1 + 2 - 1) / 2
    assert quad.grad([1.0, 1.0, 1.0]) == [1.0, 2.0, -1.0]

    monkey = deopt.monkey_saddle()
    assert monkey.loss([1.0, 0.0]) == 1.0
    assert monkey.loss([0.0, 0.0]) == 0.0


def test_mlp_problem():
    mlp = deopt.mlp_moons(hidden=16, n=200, noise=0.1, seed=42, batch_size=32)
    assert mlp.dim == 82
    theta = deopt.init_params(hidden=16, seed=42)
    assert len(theta) == 82
    full = mlp.loss(theta)
    batched = mlp.loss(theta, batch_seed=42, batch_step=0)
    assert math.isfinite(full) and full > 0.0
    assert math.isfinite(batched)
    g = mlp.grad(theta, batch_seed=42, batch_step=0)
    assert len(g) == 82
    assert all(math.isfinite(x) for x in g)


def test_moons_csv_deterministic():
    a = deopt.moons_csv(n=50, noise=0.05, seed=3)
    b = deopt.moons_csv(n=50, noise=0.05, seed=3)
    assert a == b
    lines = a.strip().split("\n")
    assert lines[0] == "x1,x2,label"
    assert len(lines) == 51


def test_oracle():
    h, asym = deopt.hessian_fd(deopt.rosenbrock(2), [1.0, 1.0])
    expected = [[802.0, -400.0], [-400.0, 200.0]]
    for i in range(2):
        for j in range(2):
            assert abs(h[i][j] - expected[i][j]) <= 1e-4 * 802.0
    assert asym <= 1e-6 * 802.0

    values, vectors = deopt.eig_sym([[0.0, 1.0], [1.0, 0.0]])
    assert values[0] == pytest.approx(-1.0, abs=1e-12)
    assert values[1] == pytest.approx(1.0, abs=1e-12)
    s = 1.0 / math.sqrt(2.0)
    assert vectors[0][0] == pytest.approx(s, abs=1e-12)
    assert vectors[0][1] == pytest.approx(-s, abs=1e-12)

    assert deopt.alignment([2.0, 0.0], [-1.0, 0.0]) == 1.0
    assert deopt.alignment([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert deopt.alignment([1.0, 1.0], [1.0, 0.0]) == pytest.approx(
        s, abs=1e-15
    )
    with pytest.raises(ValueError):
        deopt.alignment([0.0, 0.0], [1.0, 0.0])


def test_dimer_primitives():
    assert deopt.project_gradient([3.0, 4.0], [1.0, 0.0], 5.0) == [-12.0, 4.0]

    quad = deopt.quadratic([1.0, -1.0])
    theta = [0.3, -0.7]
    g = quad.grad(theta)
    cfg = deopt.DimerConfig()
    state = deopt.DimerState.init_random(2, cfg, 7)
    assert deopt.norm(state.direction) == pytest.approx(1.0, abs=1e-12)
    new_state, diag = deopt.rotate_once(quad, theta, g, state)
    assert deopt.norm(new_state.direction) == pytest.approx(1.0, abs=1e-12)
    assert math.isfinite(diag.curvature_grad)
    assert math.isfinite(diag.curvature_paper)
    assert math.isfinite(diag.curvature_second_order)
    assert len(diag.rotational_force) == 2


def test_first_adam_step_is_exact():
    cfg = deopt.AdamConfig()
    theta1, state = deopt.adam_step(
        [0.0, 0.0], [0.5, -0.25], 1e-3, deopt.AdamState.zeros(2), cfg
    )
    assert state.t == 1
    assert state.m[0] / (1.0 - cfg.beta1) == 0.5
    assert state.v[0] / (1.0 - cfg.beta2) == 0.25
    want = -1e-3 * 0.5 / (0.5 + cfg.epsilon)
    assert theta1[0] == pytest.approx(want, abs=1e-15)


def test_cosine_schedule():
    assert deopt.cosine_lr(0, 100, 6e-4, 0.0) == 6e-4
    assert deopt.cosine_lr(100, 100, 6e-4, 0.0) == 0.0


def test_run_wrapper():
    cfg = deopt.RunConfig()
    cfg.landscape = "quadratic"
    cfg.optimizer = "deo-adam"
    cfg.steps = 12
    csv_text, summary = deopt.run(cfg)

    lines = csv_text.strip().split("\n")
    assert lines[0] == HEADER
    assert len(lines) == 13
    assert summary["status"] == "ok"
    assert summary["grad_evals"] == 13  # 12 + floor(12/10)
    assert summary["config"]["optimizer"] == "deo-adam"
    validate_summary(summary)

    csv_again, _ = deopt.run(cfg)
    assert csv_again == csv_text


def test_never_refresh_sentinel():
    cfg = deopt.RunConfig()
    cfg.landscape = "quadratic"
    cfg.optimizer = "deo-adam"
    cfg.steps = 9
    cfg.f = deopt.NEVER_REFRESH
    _, summary = deopt.run(cfg)
    assert summary["config"]["f"] == "inf"
    assert summary["grad_evals"] == 9


def test_compare_wrapper():
    base = deopt.RunConfig()
    base.landscape = "rosenbrock"
    base.optimizer = "adam"
    base.steps = 20

    wrapped = deopt.RunConfig()
    wrapped.landscape = "rosenbrock"
    wrapped.optimizer = "deo-adam"
    wrapped.steps = 20
    wrapped.alpha = 0.0

    csv_text, summary = deopt.compare([base, wrapped])
    assert summary["status"] == "ok"
    assert [row["optimizer"] for row in summary["table"]] == ["adam", "deo-adam"]
    validate_summary(summary)

    rows = csv_text.strip().split("\n")[1:]
    assert len(rows) == 40
    losses = [line.split(",")[3] for line in rows]
    assert losses[:20] == losses[20:]


def test_config_errors_raise():
    cfg = deopt.RunConfig()
    cfg.optimizer = "sophia"
    with pytest.raises(deopt.ConfigError):
        deopt.run(cfg)
    with pytest.raises(deopt.ConfigError):
        deopt.compare([])


def test_numeric_failure_is_reported_not_raised():
    cfg = deopt.RunConfig()
    cfg.landscape = "rosenbrock"
    cfg.optimizer = "sgd"
    cfg.steps = 50
    cfg.lr_max = 10.0
    _, summary = deopt.run(cfg)
    assert summary["status"] == "numeric_failure"
    assert summary["failing_step"] >= 1
    validate_summary(summary)
