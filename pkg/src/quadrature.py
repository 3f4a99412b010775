# src/quadrature.py
"""
Reglas de cuadratura sobre el triángulo de referencia y sobre aristas.

- Triángulo de referencia: vértices (0,0), (1,0), (0,1); área 1/2.
- Reglas de volumen: producto tensorial colapsado (Duffy) de Gauss–Legendre
  y Gauss–Jacobi(1,0). Con n puntos por dirección la regla es exacta para
  polinomios de grado total 2n−1.
- Reglas de arista: Gauss–Legendre sobre [0, 1] (los pesos suman 1 y se
  escalan por la longitud física de la arista al integrar).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

# Exactitud máxima soportada por las reglas de ensamblaje
MAX_EXACTNESS = 20

VOLUME = "volume"
EDGE = "edge"


@dataclass(frozen=True)
class QuadratureRule:
    """Regla de cuadratura de referencia.

    Attributes:
        points: Para volumen, arreglo (n, 2) en el triángulo de referencia.
            Para arista, arreglo (n,) en [0, 1].
        weights: Pesos positivos (suman 1/2 en volumen y 1 en arista).
        exactness: Grado polinomial máximo integrado exactamente.
        kind: "volume" o "edge".
    """

    points: np.ndarray
    weights: np.ndarray
    exactness: int
    kind: str

    @property
    def n_points(self) -> int:
        return int(self.weights.shape[0])


def _points_per_direction(exactness: int) -> int:
    # n puntos de Gauss integran exactamente grado 2n−1
    return exactness // 2 + 1


def _check_exactness(exactness: int) -> None:
    if not isinstance(exactness, (int, np.integer)) or isinstance(exactness, bool):
        raise ValueError(f"Grado de cuadratura inválido: {exactness!r}")
    if exactness < 0 or exactness > MAX_EXACTNESS:
        raise ValueError(
            f"Grado de cuadratura fuera de rango [0, {MAX_EXACTNESS}]: {exactness}"
        )


def _legendre_01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss–Legendre con n puntos en [0, 1]."""
    t, w = roots_legendre(n)
    return (t + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=None)
def _collapsed_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Regla colapsada n×n sobre el triángulo de referencia.

    x = ξ(1−η), y = η, con ξ de Gauss–Legendre y η de Gauss–Jacobi con
    peso (1−η); el jacobiano (1−η) queda absorbido en el peso de Jacobi.
    """
    xi, w_xi = _legendre_01(n)
    t, w_t = roots_jacobi(n, 1.0, 0.0)
    eta = (t + 1.0) / 2.0
    w_eta = w_t / 4.0

    x = np.outer(1.0 - eta, xi).ravel()
    y = np.repeat(eta, n)
    w = np.outer(w_eta, w_xi).ravel()
    points = np.column_stack((x, y))
    points.setflags(write=False)
    w.setflags(write=False)
    return points, w


def volume_rule(exactness: int) -> QuadratureRule:
    """Regla de volumen exacta hasta grado `exactness` en el triángulo de referencia.

    Args:
        exactness: Grado polinomial requerido, 0 ≤ exactness ≤ 20.

    Returns:
        QuadratureRule con pesos positivos que suman 1/2.

    Raises:
        ValueError: Si el grado está fuera de rango.
    """
    _check_exactness(exactness)
    points, weights = _collapsed_rule(_points_per_direction(int(exactness)))
    return QuadratureRule(points, weights, int(exactness), VOLUME)


@lru_cache(maxsize=None)
def _edge_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    s, w = _legendre_01(n)
    s.setflags(write=False)
    w.setflags(write=False)
    return s, w


def edge_rule(exactness: int) -> QuadratureRule:
    """Regla de Gauss–Legendre en [0, 1] exacta hasta grado `exactness`."""
    _check_exactness(exactness)
    s, w = _edge_points(_points_per_direction(int(exactness)))
    return QuadratureRule(s, w, int(exactness), EDGE)


def min_volume_weight(rule: QuadratureRule) -> float:
    """Menor peso normalizado ω = min w_i / Σ w_i de una regla de volumen.

    Es el factor ω de la condición CFL. Para la regla de un punto vale 1.
    """
    if rule.kind != VOLUME:
        raise ValueError("ω solo está definido para reglas de volumen")
    return float(np.min(rule.weights) / np.sum(rule.weights))


def collapsed_gauss_points(n_per_direction: int = 19) -> np.ndarray:
    """Conjunto de n×n puntos de Gauss colapsados (muestreo de errores L∞)."""
    if n_per_direction < 1:
        raise ValueError(f"Número de puntos inválido: {n_per_direction}")
    points, _ = _collapsed_rule(int(n_per_direction))
    return points


def assembly_exactness(k: int, strongly_nonlinear: bool = False) -> int:
    """Exactitud de la regla de ensamblaje: 2k+1, o 4k+1 para modelos fuertemente no lineales."""
    return 4 * k + 1 if strongly_nonlinear else 2 * k + 1
