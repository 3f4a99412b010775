# src/basis.py
"""
Base modal ortonormal (tipo Dubiner) sobre el triángulo de referencia.

Cada función base se guarda como polinomio explícito en monomios x^i y^j,
construido a partir de las coordenadas colapsadas:

    φ_pq = P_p(a) · (1−y)^p · P_q^(2p+1, 0)(2y−1)

con a·(1−y) = 2x + y − 1. Las derivadas primeras y segundas son exactas
(derivación de los coeficientes), sin diferencias finitas.

Orden de los grados de libertad: por grado total p+q y, dentro de cada
grado, q creciente. El índice 0 es la constante √2, de modo que el
promedio de celda es √2·c₀.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly
from scipy.signal import convolve2d
from scipy.special import jacobi

from quadrature import volume_rule

MAX_DEGREE = 4

# Valor de la función constante ortonormal (área de referencia 1/2)
PHI0 = float(np.sqrt(2.0))

# a·(1−y) = 2x + y − 1 y (1−y), como coeficientes C[i, j] de x^i y^j
_COLLAPSED_A = np.array([[-1.0, 1.0], [2.0, 0.0]])
_ONE_MINUS_Y = np.array([[1.0, -1.0]])


def n_dof(k: int) -> int:
    """Número de funciones base de grado total ≤ k: (k+1)(k+2)/2."""
    return (k + 1) * (k + 2) // 2


def _pow2d(c: np.ndarray, e: int) -> np.ndarray:
    result = np.ones((1, 1))
    for _ in range(e):
        result = convolve2d(result, c)
    return result


def _pad(c: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros((size, size))
    rows, cols = min(c.shape[0], size), min(c.shape[1], size)
    out[:rows, :cols] = c[:rows, :cols]
    return out


def _dubiner_coefficients(p: int, q: int, size: int) -> np.ndarray:
    # P_p(a)(1−y)^p = Σ_j ℓ_j (a(1−y))^j (1−y)^(p−j)
    ell = npleg.leg2poly([0.0] * p + [1.0])
    radial = np.zeros((size, size))
    for j, lj in enumerate(ell):
        radial += lj * _pad(convolve2d(_pow2d(_COLLAPSED_A, j), _pow2d(_ONE_MINUS_Y, p - j)), size)

    # P_q^(2p+1,0)(2y−1) en potencias crecientes de y
    jac = np.asarray(jacobi(q, 2 * p + 1, 0.0).coeffs, dtype=float)[::-1]
    in_y = np.zeros(1)
    for i, ci in enumerate(jac):
        in_y = nppoly.polyadd(in_y, ci * nppoly.polypow([-1.0, 2.0], i))
    vertical = in_y.reshape(1, -1)

    return _pad(convolve2d(radial, vertical), size)


class OrthonormalBasis:
    """Base ortonormal de grado k ≤ 4 sobre el triángulo de referencia.

    Attributes:
        degree: Grado polinomial k.
        n_dof: Número de funciones base.
    """

    def __init__(self, degree: int) -> None:
        if degree < 0 or degree > MAX_DEGREE:
            raise ValueError(f"Grado de base no soportado: {degree} (0 ≤ k ≤ {MAX_DEGREE})")
        self.degree = int(degree)
        self.n_dof = n_dof(self.degree)
        size = self.degree + 1
        self._size = size

        coeffs = []
        for total in range(self.degree + 1):
            for q in range(total + 1):
                coeffs.append(_dubiner_coefficients(total - q, q, size))
        coeffs = np.array(coeffs)

        # Normalización con una regla exacta para grado 2k
        rule = volume_rule(2 * self.degree)
        values = self._evaluate(coeffs, rule.points)
        norms = np.sqrt(np.einsum("q,qd,qd->d", rule.weights, values, values))
        coeffs = coeffs / norms[:, None, None]

        self._coeffs = coeffs
        self._dx = self._derivative(coeffs, 0)
        self._dy = self._derivative(coeffs, 1)
        self._dxx = self._derivative(self._dx, 0)
        self._dxy = self._derivative(self._dx, 1)
        self._dyy = self._derivative(self._dy, 1)

    def _derivative(self, coeffs: np.ndarray, axis: int) -> np.ndarray:
        d = nppoly.polyder(coeffs, axis=axis + 1)
        out = np.zeros_like(coeffs)
        if axis == 0:
            out[:, : d.shape[1], :] = d
        else:
            out[:, :, : d.shape[2]] = d
        return out

    def _monomials(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        powers = np.arange(self._size)
        px = pts[:, 0:1] ** powers
        py = pts[:, 1:2] ** powers
        return (px[:, :, None] * py[:, None, :]).reshape(pts.shape[0], -1)

    def _evaluate(self, coeffs: np.ndarray, points: np.ndarray) -> np.ndarray:
        flat = coeffs.reshape(coeffs.shape[0], -1)
        return self._monomials(points) @ flat.T

    def values(self, points: np.ndarray) -> np.ndarray:
        """Valores φ_j en los puntos de referencia, forma (n_puntos, n_dof)."""
        return self._evaluate(self._coeffs, points)

    def gradients(self, points: np.ndarray) -> np.ndarray:
        """Gradientes de referencia, forma (n_puntos, n_dof, 2)."""
        return np.stack(
            (self._evaluate(self._dx, points), self._evaluate(self._dy, points)), axis=-1
        )

    def hessians(self, points: np.ndarray) -> np.ndarray:
        """Hessianas de referencia, forma (n_puntos, n_dof, 2, 2)."""
        xx = self._evaluate(self._dxx, points)
        xy = self._evaluate(self._dxy, points)
        yy = self._evaluate(self._dyy, points)
        return np.stack((np.stack((xx, xy), -1), np.stack((xy, yy), -1)), -2)


@lru_cache(maxsize=None)
def get_basis(k: int) -> OrthonormalBasis:
    """Instancia compartida de la base de grado k."""
    return OrthonormalBasis(k)


def eval_basis(
    k: int, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Valores, gradientes y hessianas de la base de grado k en puntos de referencia."""
    basis = get_basis(k)
    return basis.values(points), basis.gradients(points), basis.hessians(points)


@dataclass(frozen=True)
class AffineMap:
    """Mapa afín x = b + J r del triángulo de referencia a un elemento físico."""

    element: int
    jacobian: np.ndarray
    inverse: np.ndarray
    det: float
    translation: np.ndarray

    @classmethod
    def from_vertices(cls, element: int, vertices: np.ndarray) -> "AffineMap":
        v = np.asarray(vertices, dtype=float)
        jac = np.column_stack((v[1] - v[0], v[2] - v[0]))
        det = float(np.linalg.det(jac))
        if det <= 0.0:
            raise ValueError(f"Elemento {element} degenerado o con orientación horaria")
        return cls(element, jac, np.linalg.inv(jac), det, v[0].copy())

    def to_physical(self, ref_points: np.ndarray) -> np.ndarray:
        return self.translation + np.asarray(ref_points) @ self.jacobian.T

    def to_reference(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points) - self.translation) @ self.inverse.T


def physical_derivatives(
    affine: AffineMap | np.ndarray,
    grad_ref: np.ndarray,
    hess_ref: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Transforma gradientes y hessianas de referencia a coordenadas físicas.

    ∇ₓφ = J⁻ᵀ ∇ᵣφ y Hₓ = J⁻ᵀ Hᵣ J⁻¹ (mapa afín, sin términos de curvatura).

    Args:
        affine: AffineMap o directamente la matriz inversa J⁻¹ (2×2).
        grad_ref: Gradientes de referencia (..., 2).
        hess_ref: Hessianas de referencia (..., 2, 2), opcional.
    """
    inv = affine.inverse if isinstance(affine, AffineMap) else np.asarray(affine)
    grad = np.asarray(grad_ref) @ inv
    hess = None
    if hess_ref is not None:
        hess = np.einsum("ai,...ab,bj->...ij", inv, np.asarray(hess_ref), inv)
    return grad, hess
