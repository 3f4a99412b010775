# src/timestep.py
"""
Integración temporal SSP-RK3 con paso CFL y reinicio por violación de cotas.

- `compute_dt`: Δt = seguridad·ωλ·min h_K²/μ_eff (modo estándar) o
  Δt = seguridad·min(ωλ, 1/max ū)·min h_K²/μ (modo blow-up). El último paso
  se recorta para terminar exactamente en T.
- `ssp_rk3_step`: Runge–Kutta SSP de tercer orden (Shu–Osher), con el
  limitador aplicado tras cada etapa.
- `run_with_restart`: bucle de integración. Si un paso deja promedios fuera
  de cotas o valores no finitos, se rechaza y se repite con Δt/2; cuando
  Δt cae bajo el umbral (o t + Δt == t) se declara blow-up en t.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ddg import NonFiniteStateError, cell_averages
from limiter import BoundViolationError, ScalingLimiter
from mesh import Mesh
from models import DiffusionModel

LOGGER = logging.getLogger(__name__)

STANDARD = "standard"
BLOWUP = "blowup"
CFL_MODES = (STANDARD, BLOWUP)

COMPLETED = "completed"
BLOWUP_DECLARED = "blowup"
FAILED = "failed"
MAX_STEPS = "max_steps"

Operator = Callable[[np.ndarray, float], np.ndarray]
DtRule = Callable[[np.ndarray, float], float]


@dataclass(frozen=True)
class TimeConfig:
    """Parámetros de la integración temporal."""

    cfl: float  # λ
    final_time: float  # T
    cfl_mode: str = STANDARD
    restart_enabled: bool = False
    dt_floor: float = 1e-13
    safety: float = 1.0
    max_steps: Optional[int] = None

    def __post_init__(self) -> None:
        if self.cfl <= 0.0:
            raise ValueError(f"λ debe ser positivo: {self.cfl}")
        if self.final_time <= 0.0:
            raise ValueError(f"T debe ser positivo: {self.final_time}")
        if self.cfl_mode not in CFL_MODES:
            raise ValueError(f"Modo CFL desconocido: {self.cfl_mode!r}")


def compute_dt(
    mesh: Mesh,
    model: DiffusionModel,
    omega: float,
    cfl: float,
    cfl_mode: str = STANDARD,
    safety: float = 1.0,
    u_range: tuple[float, float] | None = None,
    max_average: float | None = None,
    t: float | None = None,
    final_time: float | None = None,
) -> float:
    """Paso de tiempo CFL.

    Args:
        mesh: Malla (se usa min h_K).
        model: Modelo; μ_eff es el mayor autovalor de A sobre `u_range`.
        omega: Menor peso normalizado de la regla de volumen.
        cfl: λ.
        cfl_mode: "standard" o "blowup".
        safety: Factor de seguridad multiplicativo.
        u_range: Rango puntual actual de la solución (modelos no lineales).
        max_average: max_K ū_K (modo blow-up).
        t, final_time: Si se dan, Δt se recorta a T − t.
    """
    h2 = float(np.min(mesh.h_K)) ** 2
    if cfl_mode == BLOWUP:
        factor = omega * cfl
        if max_average is not None and max_average > 0.0:
            factor = min(factor, 1.0 / max_average)
        dt = safety * factor * h2 / model.mu
    elif cfl_mode == STANDARD:
        lo, hi = u_range if u_range is not None else model.solution_range
        mu_eff = model.max_eigenvalue(lo, hi)
        if not mu_eff > 0.0:
            mu_eff = model.mu
        dt = safety * omega * cfl * h2 / mu_eff
    else:
        raise ValueError(f"Modo CFL desconocido: {cfl_mode!r}")

    if t is not None and final_time is not None:
        dt = min(dt, final_time - t)
    return float(dt)


def ssp_rk3_step(
    coefficients: np.ndarray,
    dt: float,
    operator: Operator,
    t: float = 0.0,
    limiter: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> np.ndarray:
    """Un paso SSP-RK3 de Shu–Osher.

    u¹ = u + Δt L(u)
    u² = ¾u + ¼(u¹ + Δt L(u¹))
    u³ = ⅓u + ⅔(u² + Δt L(u²))
    """
    limit = limiter if limiter is not None else (lambda c: c)
    u0 = np.asarray(coefficients, dtype=float)
    u1 = limit(u0 + dt * operator(u0, t))
    u2 = limit(0.75 * u0 + 0.25 * (u1 + dt * operator(u1, t + dt)))
    return limit(u0 / 3.0 + 2.0 / 3.0 * (u2 + dt * operator(u2, t + 0.5 * dt)))


@dataclass
class StepEvent:
    """Registro de un paso aceptado, un reinicio o el cierre de la integración."""

    step: int
    time: float
    dt: float
    restarts: int
    max_average: float
    min_average: float
    energy: float
    mass: float
    status: str

    def as_row(self) -> list[str]:
        return [
            str(self.step),
            f"{self.time:.10e}",
            f"{self.dt:.6e}",
            str(self.restarts),
            f"{self.max_average:.10e}",
            f"{self.min_average:.10e}",
            f"{self.energy:.10e}",
            f"{self.mass:.10e}",
            self.status,
        ]


EVENT_HEADER = ["paso", "t", "dt", "reinicios", "max_promedio", "min_promedio", "energia", "masa", "estado"]


@dataclass
class IntegrationResult:
    coefficients: np.ndarray
    time: float
    steps: int
    status: str
    events: list[StepEvent] = field(default_factory=list)
    total_restarts: int = 0
    message: str = ""

    @property
    def blowup_time(self) -> Optional[float]:
        return self.time if self.status == BLOWUP_DECLARED else None


def run_with_restart(
    coefficients: np.ndarray,
    config: TimeConfig,
    operator: Operator,
    dt_rule: DtRule,
    limiter: Optional[ScalingLimiter] = None,
    t0: float = 0.0,
    energy: Optional[Callable[[np.ndarray], float]] = None,
    mass: Optional[Callable[[np.ndarray], float]] = None,
    on_event: Optional[Callable[[StepEvent], None]] = None,
) -> IntegrationResult:
    """Integra hasta T con reinicio (Δt/2) ante estados inválidos.

    Args:
        coefficients: Estado inicial.
        config: TimeConfig.
        operator: L(u, t).
        dt_rule: Δt propuesto para (u, t), ya recortado a T.
        limiter: Limitador opcional; también valida los promedios tras el paso.
        t0: Tiempo inicial.
        energy, mass: Funcionales registrados en cada evento.
        on_event: Callback por evento (pasos, reinicios y cierre).

    Returns:
        IntegrationResult con estado "completed", "blowup", "failed" o "max_steps".
    """
    energy = energy or (lambda c: float(np.sum(np.asarray(c) ** 2)))
    mass = mass or (lambda c: float("nan"))
    u = np.array(coefficients, dtype=float, copy=True)
    t = float(t0)
    T = config.final_time
    events: list[StepEvent] = []
    total_restarts = 0
    step = 0

    def emit(dt: float, restarts: int, status: str, state: np.ndarray) -> None:
        avg = cell_averages(state)
        with np.errstate(invalid="ignore"):
            ev = StepEvent(
                step, t, dt, restarts, float(np.max(avg)), float(np.min(avg)), energy(state), mass(state), status
            )
        events.append(ev)
        if on_event is not None:
            on_event(ev)

    def finish(status: str, message: str = "") -> IntegrationResult:
        return IntegrationResult(u, t, step, status, events, total_restarts, message)

    while t < T:
        if config.max_steps is not None and step >= config.max_steps:
            LOGGER.warning("Se alcanzó el máximo de pasos (%d) en t=%.6e", config.max_steps, t)
            emit(0.0, 0, MAX_STEPS, u)
            return finish(MAX_STEPS, "máximo de pasos alcanzado")

        dt = float(dt_rule(u, t))
        restarts = 0
        while True:
            if not np.isfinite(dt) or dt < config.dt_floor or t + dt == t:
                LOGGER.info("💥 Blow-up declarado en t=%.6e (Δt=%.3e)", t, dt)
                emit(dt, restarts, BLOWUP_DECLARED, u)
                return finish(BLOWUP_DECLARED, f"Δt={dt:.3e} bajo el umbral")
            try:
                new = ssp_rk3_step(u, dt, operator, t, limiter)
                if limiter is not None:
                    limiter.check_averages(new)
                elif not np.all(np.isfinite(new)):
                    raise NonFiniteStateError(f"Estado no finito en t={t:.6e}")
                break
            except (BoundViolationError, NonFiniteStateError) as exc:
                if not config.restart_enabled:
                    LOGGER.error("Paso rechazado sin reinicio habilitado: %s", exc)
                    emit(dt, restarts, FAILED, u)
                    return finish(FAILED, str(exc))
                restarts += 1
                total_restarts += 1
                LOGGER.info("↩️ Reinicio %d en t=%.6e: %s", restarts, t, exc)
                emit(dt, restarts, "reinicio", u)
                dt *= 0.5

        u = new
        step += 1
        t = T if T - (t + dt) <= 1e-14 * max(1.0, abs(T)) else t + dt
        emit(dt, restarts, "paso", u)

    return finish(COMPLETED)
