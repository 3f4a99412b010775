# src/norms.py
"""
Normas de error y órdenes de convergencia.

- L₂: regla colapsada con k+1 puntos por dirección (exactitud 2k+1).
- L∞: máximo sobre 19×19 = 361 puntos de Gauss colapsados por elemento.
- Orden entre dos niveles con razón de malla 2: log₂(e_grueso / e_fino).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from basis import get_basis
from ddg import DGField
from mesh import Mesh
from quadrature import QuadratureRule, collapsed_gauss_points, volume_rule

ExactFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]

LINF_POINTS_PER_DIRECTION = 19


def _physical_points(mesh: Mesh, ref_points: np.ndarray) -> np.ndarray:
    return np.einsum("eij,qj->eqi", mesh.jacobians, ref_points) + mesh.element_vertices[:, 0][:, None, :]


def _require_exact(exact: Optional[ExactFn]) -> ExactFn:
    if exact is None:
        raise ValueError("El modelo no tiene solución exacta; no se puede medir el error")
    return exact


def l2_error(
    field: DGField,
    mesh: Mesh,
    exact: Optional[ExactFn],
    t: float,
    rule: QuadratureRule | None = None,
) -> float:
    """‖u_h − U(·, t)‖_L₂ sobre el dominio."""
    exact = _require_exact(exact)
    rule = rule or volume_rule(2 * field.degree + 1)
    phi = get_basis(field.degree).values(rule.points)
    uh = field.coefficients @ phi.T
    xq = _physical_points(mesh, rule.points)
    diff = uh - exact(xq[..., 0], xq[..., 1], t)
    local = np.abs(mesh.dets)[:, None] * rule.weights[None, :] * diff**2
    return float(np.sqrt(np.sum(local)))


def linf_error(
    field: DGField,
    mesh: Mesh,
    exact: Optional[ExactFn],
    t: float,
    n_per_direction: int = LINF_POINTS_PER_DIRECTION,
) -> float:
    """max |u_h − U(·, t)| sobre los puntos colapsados de cada elemento."""
    exact = _require_exact(exact)
    points = collapsed_gauss_points(n_per_direction)
    uh = field.evaluate(points)
    xq = _physical_points(mesh, points)
    return float(np.max(np.abs(uh - exact(xq[..., 0], xq[..., 1], t))))


def convergence_orders(errors: list[float], levels: list[int]) -> list[Optional[float]]:
    """Órdenes entre niveles consecutivos; None si la razón de malla no es 2 o el error es nulo."""
    orders: list[Optional[float]] = [None]
    for i in range(1, len(errors)):
        coarse, fine = errors[i - 1], errors[i]
        if levels[i] != 2 * levels[i - 1] or not (coarse > 0.0 and fine > 0.0):
            orders.append(None)
            continue
        if not (math.isfinite(coarse) and math.isfinite(fine)):
            orders.append(None)
            continue
        orders.append(math.log2(coarse / fine))
    return orders


@dataclass
class ErrorReport:
    """Errores por nivel de malla de un estudio de convergencia."""

    levels: list[int] = field(default_factory=list)
    l2: list[float] = field(default_factory=list)
    linf: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, level: int, l2: float, linf: float, note: str = "") -> None:
        self.levels.append(int(level))
        self.l2.append(float(l2))
        self.linf.append(float(linf))
        self.notes.append(note)

    @property
    def l2_orders(self) -> list[Optional[float]]:
        return convergence_orders(self.l2, self.levels)

    @property
    def linf_orders(self) -> list[Optional[float]]:
        return convergence_orders(self.linf, self.levels)
