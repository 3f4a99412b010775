# src/limiter.py
"""
Limitador de escalamiento lineal (principio del máximo / positividad).

En cada elemento se reemplaza u por ū + θ(u − ū) con

    θ = min(1, (M − ū)/(u_max − ū), (ū − m)/(ū − u_min))

donde u_max y u_min se toman sobre un conjunto de puntos de muestreo que
incluye los puntos de cuadratura de volumen, los de arista y los vértices.
Con base ortonormal, u − ū son exactamente los modos j ≥ 1, así que el
limitador escala esos coeficientes y deja c₀ (el promedio) intacto.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from basis import get_basis
from ddg import DGField, cell_averages
from quadrature import QuadratureRule

LOGGER = logging.getLogger(__name__)

# Tolerancia relativa para considerar que una muestra viola la cota
_SAMPLE_TOL = 1e-13
# Tolerancia para promedios fuera de [m, M]
_AVERAGE_TOL = 1e-12

REFERENCE_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


class BoundViolationError(RuntimeError):
    """Hay promedios de celda fuera de [m, M]; el paso debe rechazarse."""

    def __init__(self, elements: np.ndarray, message: str | None = None) -> None:
        self.elements = np.asarray(elements, dtype=int)
        super().__init__(
            message or f"{self.elements.size} promedio(s) de celda fuera de cotas "
            f"(primeros: {self.elements[:5].tolist()})"
        )


@dataclass(frozen=True)
class LimiterConfig:
    """Cotas [m, M] del limitador; M = ∞ deja solo positividad."""

    lower: float = -np.inf
    upper: float = np.inf

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ValueError(f"Cotas de limitador inválidas: [{self.lower}, {self.upper}]")


def limiter_sample_points(volume: QuadratureRule, edge: QuadratureRule) -> np.ndarray:
    """Puntos de referencia donde se evalúa el rango del polinomio."""
    s = edge.points
    on_edges = np.vstack(
        (
            np.column_stack((s, np.zeros_like(s))),
            np.column_stack((1.0 - s, s)),
            np.column_stack((np.zeros_like(s), 1.0 - s)),
        )
    )
    return np.vstack((volume.points, on_edges, REFERENCE_VERTICES))


class ScalingLimiter:
    """Limitador de escalamiento precalculado para un grado y unas reglas dadas."""

    def __init__(self, k: int, volume: QuadratureRule, edge: QuadratureRule, config: LimiterConfig) -> None:
        self.config = config
        self.points = limiter_sample_points(volume, edge)
        self._phi = get_basis(k).values(self.points)

    def sample(self, coefficients: np.ndarray) -> np.ndarray:
        """Valores de u en los puntos de muestreo, (nE, n_muestras)."""
        return np.asarray(coefficients) @ self._phi.T

    def check_averages(self, coefficients: np.ndarray) -> np.ndarray:
        """Promedios de celda; lanza BoundViolationError si alguno sale de [m, M]."""
        avg = cell_averages(coefficients)
        m, big_m = self.config.lower, self.config.upper
        bad = ~np.isfinite(avg)
        if np.isfinite(m):
            bad |= avg < m - _AVERAGE_TOL * max(1.0, abs(m))
        if np.isfinite(big_m):
            bad |= avg > big_m + _AVERAGE_TOL * max(1.0, abs(big_m))
        if np.any(bad):
            raise BoundViolationError(np.flatnonzero(bad))
        return avg

    def theta(self, coefficients: np.ndarray) -> np.ndarray:
        """Factor de escalamiento θ ∈ [0, 1] por elemento."""
        avg = self.check_averages(coefficients)
        values = self.sample(coefficients)
        u_max = values.max(axis=1)
        u_min = values.min(axis=1)
        m, big_m = self.config.lower, self.config.upper
        theta = np.ones_like(avg)

        if np.isfinite(big_m):
            over = u_max > big_m + _SAMPLE_TOL * max(1.0, abs(big_m))
            if np.any(over):
                ratio = (big_m - avg[over]) / (u_max[over] - avg[over])
                theta[over] = np.minimum(theta[over], np.clip(ratio, 0.0, 1.0))
        if np.isfinite(m):
            under = u_min < m - _SAMPLE_TOL * max(1.0, abs(m))
            if np.any(under):
                ratio = (avg[under] - m) / (avg[under] - u_min[under])
                theta[under] = np.minimum(theta[under], np.clip(ratio, 0.0, 1.0))
        return theta

    def apply(self, coefficients: np.ndarray) -> np.ndarray:
        """Devuelve coeficientes limitados; los elementos con θ = 1 no cambian.

        Raises:
            BoundViolationError: Si algún promedio de celda está fuera de [m, M].
        """
        c = np.array(coefficients, dtype=float, copy=True)
        theta = self.theta(c)
        limited = theta < 1.0
        if np.any(limited):
            c[limited, 1:] *= theta[limited, None]
            LOGGER.debug("Limitador activo en %d elemento(s)", int(limited.sum()))
        return c

    __call__ = apply


def apply_scaling_limiter(
    field: DGField,
    config: LimiterConfig,
    volume: QuadratureRule,
    edge: QuadratureRule,
) -> DGField:
    """Aplica el limitador a un DGField y devuelve un campo nuevo."""
    limiter = ScalingLimiter(field.degree, volume, edge, config)
    return field.with_coefficients(limiter.apply(field.coefficients))
