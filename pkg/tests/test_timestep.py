# tests/test_timestep.py
"""
Tests para timestep.py

Prueba:
- SSP-RK3 sobre u' = −u (un paso con Δt = 0.1) y orden temporal 3
- Δt CFL en modo estándar y blow-up, y recorte del último paso
- Bucle con reinicio: fallo inyectado, blow-up, máximo de pasos
"""

from types import SimpleNamespace

import numpy as np
import pytest

from timestep import (
    BLOWUP,
    BLOWUP_DECLARED,
    COMPLETED,
    EVENT_HEADER,
    FAILED,
    MAX_STEPS,
    StepEvent,
    TimeConfig,
    compute_dt,
    run_with_restart,
    ssp_rk3_step,
)


def decay(u, t):
    return -u


class FlakyOperator:
    """Devuelve NaN en las primeras `failures` evaluaciones y luego −u."""

    def __init__(self, failures):
        self.failures = failures
        self.calls = 0

    def __call__(self, u, t):
        self.calls += 1
        if self.calls <= self.failures:
            return np.full_like(u, np.nan)
        return -u


def fixed_dt(value, final_time):
    return lambda u, t: min(value, final_time - t)


def test_rk3_single_step():
    u = ssp_rk3_step(np.array([[1.0]]), 0.1, decay)
    assert u[0, 0] == pytest.approx(1 - 0.1 + 0.005 - 0.1**3 / 6, abs=1e-15)
    assert u[0, 0] == pytest.approx(0.9048333333333334)


def test_rk3_applies_limiter_each_stage():
    calls = []

    def limiter(c):
        calls.append(1)
        return c

    ssp_rk3_step(np.ones((2, 1)), 0.1, decay, limiter=limiter)
    assert len(calls) == 3


def test_compute_dt_standard():
    mesh = SimpleNamespace(h_K=np.array([0.1, 0.2]))
    model = SimpleNamespace(mu=0.01, max_eigenvalue=lambda lo, hi: 0.01, solution_range=(-1.0, 1.0))
    assert compute_dt(mesh, model, omega=0.05, cfl=0.1) == pytest.approx(5e-3)
    assert compute_dt(mesh, model, omega=0.05, cfl=0.1, safety=0.5) == pytest.approx(2.5e-3)


def test_compute_dt_uses_effective_diffusion():
    mesh = SimpleNamespace(h_K=np.array([0.1]))
    model = SimpleNamespace(mu=0.01, max_eigenvalue=lambda lo, hi: 0.01 * 3 * hi**2, solution_range=(-1.0, 1.0))
    assert compute_dt(mesh, model, 0.05, 0.1, u_range=(0.0, 0.5)) == pytest.approx(5e-5 / 0.0075)


def test_compute_dt_blowup_mode():
    mesh = SimpleNamespace(h_K=np.array([0.1]))
    model = SimpleNamespace(mu=1.0)
    # min(ωλ, 1/max ū) = min(0.005, 1/400)
    dt = compute_dt(mesh, model, 0.05, 0.1, cfl_mode=BLOWUP, max_average=400.0)
    assert dt == pytest.approx(0.0025 * 0.01)
    assert compute_dt(mesh, model, 0.05, 0.1, cfl_mode=BLOWUP, max_average=1.0) == pytest.approx(0.005 * 0.01)


def test_compute_dt_clamps_last_step():
    mesh = SimpleNamespace(h_K=np.array([0.1]))
    model = SimpleNamespace(mu=0.01, max_eigenvalue=lambda lo, hi: 0.01, solution_range=(-1.0, 1.0))
    dt = compute_dt(mesh, model, 0.05, 0.1, t=0.998, final_time=1.0)
    assert dt == pytest.approx(0.002)


def test_compute_dt_unknown_mode():
    mesh = SimpleNamespace(h_K=np.array([0.1]))
    with pytest.raises(ValueError):
        compute_dt(mesh, SimpleNamespace(mu=1.0), 0.05, 0.1, cfl_mode="implicito")


@pytest.mark.parametrize("kwargs", [{"cfl": 0.0}, {"final_time": -1.0}, {"cfl_mode": "rapido"}])
def test_time_config_validation(kwargs):
    params = {"cfl": 0.1, "final_time": 1.0}
    params.update(kwargs)
    with pytest.raises(ValueError):
        TimeConfig(**params)


def test_run_reaches_final_time_exactly():
    config = TimeConfig(cfl=0.1, final_time=0.25)
    result = run_with_restart(np.array([[1.0]]), config, decay, fixed_dt(0.1, 0.25))
    assert result.status == COMPLETED
    assert result.time == 0.25
    assert result.steps == 3
    assert result.coefficients[0, 0] == pytest.approx(np.exp(-0.25), abs=1e-4)
    assert [ev.status for ev in result.events] == ["paso"] * 3
    assert result.blowup_time is None


def test_single_restart_after_injected_failure():
    config = TimeConfig(cfl=0.1, final_time=0.1, restart_enabled=True)
    events = []
    result = run_with_restart(
        np.array([[1.0]]), config, FlakyOperator(1), fixed_dt(0.1, 0.1), on_event=events.append
    )
    assert result.status == COMPLETED
    assert result.total_restarts == 1
    assert [ev.status for ev in events] == ["reinicio", "paso", "paso"]
    assert events[1].dt == pytest.approx(0.05)
    assert events[1].restarts == 1


def test_blowup_declared_when_dt_underflows():
    config = TimeConfig(cfl=0.1, final_time=1.0, restart_enabled=True, dt_floor=1e-3)
    result = run_with_restart(np.array([[1.0]]), config, FlakyOperator(10**6), fixed_dt(0.1, 1.0))
    assert result.status == BLOWUP_DECLARED
    assert result.blowup_time == 0.0
    # 0.1 → 0.1/2⁷ < 1e-3
    assert result.total_restarts == 7
    assert result.events[-1].status == BLOWUP_DECLARED


def test_failure_without_restart():
    config = TimeConfig(cfl=0.1, final_time=1.0)
    result = run_with_restart(np.array([[1.0]]), config, FlakyOperator(1), fixed_dt(0.1, 1.0))
    assert result.status == FAILED
    assert result.steps == 0
    assert result.events[-1].status == FAILED
    np.testing.assert_array_equal(result.coefficients, [[1.0]])


def test_max_steps():
    config = TimeConfig(cfl=0.1, final_time=1.0, max_steps=2)
    result = run_with_restart(np.array([[1.0]]), config, decay, fixed_dt(0.1, 1.0))
    assert result.status == MAX_STEPS
    assert result.steps == 2
    assert result.time == pytest.approx(0.2)


def test_event_row_matches_header():
    ev = StepEvent(3, 0.5, 0.01, 1, 0.9, 0.1, 2.0, 1.0, "paso")
    row = ev.as_row()
    assert len(row) == len(EVENT_HEADER)
    assert row[0] == "3"
    assert row[-1] == "paso"
    assert float(row[1]) == pytest.approx(0.5)


def test_rk3_temporal_order():
    """Test reducir Δt a la mitad divide el error en t=1 por ≈8 (tercer orden)."""
    errors = []
    for dt in (0.1, 0.05, 0.025):
        u = np.array([[1.0]])
        for _ in range(round(1.0 / dt)):
            u = ssp_rk3_step(u, dt, decay)
        errors.append(abs(u[0, 0] - np.exp(-1.0)))
    ratios = [errors[0] / errors[1], errors[1] / errors[2]]
    assert ratios == pytest.approx([8.0, 8.0], rel=0.1)
