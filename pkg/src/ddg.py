# src/ddg.py
"""
Núcleo del método DDG (Direct Discontinuous Galerkin) unificado.

Forma débil por elemento K, con σ = 0 (base), 1 (DDGIC y simétrica) o −1 (no simétrica):

    ∫_K u_t v + ∫_K A(u)∇u·∇v − ∫_∂K ∇̂u·ξ({u}) v + σ ∫_∂K ⟦u⟧ ∇̃v·ξ({u}) = 0

- ξ = A({u})ᵀn es el vector de dirección, evaluado en cada punto de cuadratura.
- ∇̂u = β₀⟦u⟧/h_e n + {∇u} + β₁h_e⟦H(u)n⟧ es el flujo del gradiente.
- ∇̃v es el flujo de la función test (unilateral: v se anula fuera de K).

Convenciones: en cada arista ⟦u⟧ = u_vecino − u_dueño y n es exterior al
dueño. Desde el vecino el flujo ∇̂u es el mismo vector, ξ cambia de signo y
⟦u⟧ξ no cambia. La base es ortonormal, así que la matriz de masa física de
cada elemento es |det J|·I y du/dt = RHS / |det J|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from basis import PHI0, get_basis, n_dof
from mesh import Mesh, edge_traces_setup
from models import DiffusionModel
from quadrature import assembly_exactness, edge_rule, min_volume_weight, volume_rule

LOGGER = logging.getLogger(__name__)


class NonFiniteStateError(RuntimeError):
    """El residuo o el estado contiene NaN o infinitos."""


class Variant(str, Enum):
    BASELINE = "baseline"
    DDGIC = "ddgic"
    SYMMETRIC = "symmetric"
    NONSYMMETRIC = "nonsymmetric"

    @property
    def sigma(self) -> int:
        return {"baseline": 0, "ddgic": 1, "symmetric": 1, "nonsymmetric": -1}[self.value]

    @classmethod
    def parse(cls, name: "str | Variant") -> "Variant":
        if isinstance(name, Variant):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            known = ", ".join(v.value for v in cls)
            raise ValueError(f"Variante DDG desconocida: {name!r} (disponibles: {known})") from None


@dataclass(frozen=True)
class SchemeConfig:
    """Parámetros del esquema DDG.

    Valores por defecto: β₀ = (k+1)², β₀ᵥ = β₀/2, β₁ = 1/(2k(k+1));
    para k = 0 se usa β₀ = 1 y β₁ = 0.
    """

    variant: Variant
    k: int
    beta0: float
    beta1: float
    beta0v: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if not 0 <= int(self.k) <= 4:
            raise ValueError(f"Grado polinomial no soportado: {self.k}")
        if self.beta0 < 0 or self.beta1 < 0 or self.beta0v < 0:
            raise ValueError("Los parámetros β deben ser no negativos")

    @property
    def sigma(self) -> int:
        return self.variant.sigma

    @classmethod
    def with_defaults(
        cls,
        variant: "str | Variant",
        k: int,
        beta0: float | None = None,
        beta1: float | None = None,
        beta0v: float | None = None,
    ) -> "SchemeConfig":
        if k == 0:
            d_beta0, d_beta1 = 1.0, 0.0
        else:
            d_beta0, d_beta1 = float((k + 1) ** 2), 1.0 / (2.0 * k * (k + 1))
        b0 = d_beta0 if beta0 is None else float(beta0)
        return cls(
            variant=Variant.parse(variant),
            k=int(k),
            beta0=b0,
            beta1=d_beta1 if beta1 is None else float(beta1),
            beta0v=b0 / 2.0 if beta0v is None else float(beta0v),
        )


@dataclass
class DGField:
    """Solución DG: coeficientes modales por elemento, forma (nE, n_dof)."""

    coefficients: np.ndarray
    degree: int
    time: float = 0.0

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.ndim != 2 or self.coefficients.shape[1] != n_dof(self.degree):
            raise ValueError(
                f"Coeficientes con forma {self.coefficients.shape} no corresponden a k={self.degree}"
            )

    @property
    def cell_averages(self) -> np.ndarray:
        return cell_averages(self.coefficients)

    def evaluate(self, ref_points: np.ndarray) -> np.ndarray:
        """Valores en los mismos puntos de referencia de cada elemento, (nE, n_puntos)."""
        phi = get_basis(self.degree).values(ref_points)
        return self.coefficients @ phi.T

    def with_coefficients(self, coefficients: np.ndarray, time: float | None = None) -> "DGField":
        return replace(self, coefficients=coefficients, time=self.time if time is None else time)


def cell_averages(coefficients: np.ndarray) -> np.ndarray:
    """Promedio de celda ū_K = √2·c₀ (base ortonormal sobre área de referencia 1/2)."""
    return PHI0 * np.asarray(coefficients)[:, 0]


@dataclass(frozen=True)
class EdgeTrace:
    """Trazas a ambos lados de una arista: valor, gradiente y hessiana.

    El lado "minus" es el interior (dueño) y "plus" el exterior.
    """

    value_minus: np.ndarray
    value_plus: np.ndarray
    grad_minus: np.ndarray
    grad_plus: np.ndarray
    hess_minus: np.ndarray
    hess_plus: np.ndarray

    @property
    def jump(self) -> np.ndarray:
        return self.value_plus - self.value_minus

    @property
    def average(self) -> np.ndarray:
        return 0.5 * (self.value_plus + self.value_minus)

    @property
    def grad_average(self) -> np.ndarray:
        return 0.5 * (self.grad_plus + self.grad_minus)

    @property
    def hess_jump(self) -> np.ndarray:
        return self.hess_plus - self.hess_minus

    @classmethod
    def one_sided(cls, value: np.ndarray, grad: np.ndarray, hess: np.ndarray) -> "EdgeTrace":
        """Traza de una función test: se anula fuera del elemento."""
        value = np.asarray(value, dtype=float)
        grad = np.asarray(grad, dtype=float)
        hess = np.asarray(hess, dtype=float)
        return cls(
            value, np.zeros_like(value), grad, np.zeros_like(grad), hess, np.zeros_like(hess)
        )


def direction_vector(model: DiffusionModel, u_avg: np.ndarray | float, normal: np.ndarray) -> np.ndarray:
    """ξ = A({u})ᵀ n, punto a punto."""
    mats = model.diffusion_matrix(u_avg)
    return np.einsum("...ji,...j->...i", mats, np.asarray(normal, dtype=float))


def _hessian_times_normal(hess: np.ndarray, normal: np.ndarray) -> np.ndarray:
    # (u_xx n1 + u_yx n2, u_xy n1 + u_yy n2)
    return np.einsum("...ij,...j->...i", hess, normal)


def gradient_flux(
    trace: EdgeTrace,
    normal: np.ndarray,
    h_e: np.ndarray | float,
    beta0: float,
    beta1: float,
) -> np.ndarray:
    """∇̂u = β₀⟦u⟧/h_e n + {∇u} + β₁h_e⟦H(u)n⟧."""
    normal = np.asarray(normal, dtype=float)
    h = np.asarray(h_e, dtype=float)[..., None]
    return (
        beta0 * trace.jump[..., None] / h * normal
        + trace.grad_average
        + beta1 * h * _hessian_times_normal(trace.hess_jump, normal)
    )


def test_flux(
    variant: "str | Variant",
    trace: EdgeTrace,
    normal: np.ndarray,
    h_e: np.ndarray | float,
    scheme: SchemeConfig,
) -> np.ndarray:
    """Flujo ∇̃v de la función test según la variante.

    - base: 0
    - DDGIC: {∇v}
    - simétrica: flujo del gradiente con β₀ y β₁
    - no simétrica: flujo del gradiente con β₀ᵥ y β₁
    """
    variant = Variant.parse(variant)
    if variant is Variant.BASELINE:
        return np.zeros_like(trace.grad_average)
    if variant is Variant.DDGIC:
        return trace.grad_average
    beta0 = scheme.beta0 if variant is Variant.SYMMETRIC else scheme.beta0v
    return gradient_flux(trace, normal, h_e, beta0, scheme.beta1)


def one_sided_test_flux(
    variant: "str | Variant",
    value: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    normal: np.ndarray,
    h_e: np.ndarray | float,
    scheme: SchemeConfig,
) -> np.ndarray:
    """∇̃v con v nula fuera del elemento, en forma cerrada.

    simétrica: −β₀ v n/h_e + ∇v/2 − β₁h_e H(v)n (β₀ᵥ en la no simétrica).
    """
    variant = Variant.parse(variant)
    grad = np.asarray(grad, dtype=float)
    if variant is Variant.BASELINE:
        return np.zeros_like(grad)
    if variant is Variant.DDGIC:
        return 0.5 * grad
    beta0 = scheme.beta0 if variant is Variant.SYMMETRIC else scheme.beta0v
    normal = np.asarray(normal, dtype=float)
    h = np.asarray(h_e, dtype=float)[..., None]
    return (
        -beta0 * np.asarray(value)[..., None] / h * normal
        + 0.5 * grad
        - scheme.beta1 * h * _hessian_times_normal(hess, normal)
    )


class DDGOperator:
    """Operador semidiscreto L(u) del esquema DDG sobre una malla fija.

    Precalcula en el constructor todo lo que depende solo de la geometría:
    valores y derivadas físicas de la base en los puntos de cuadratura de
    volumen y de arista (ambos lados) y los flujos test de cada función base.
    `residual(coefficients, t)` es una función pura del estado y el tiempo.
    """

    def __init__(
        self,
        mesh: Mesh,
        model: DiffusionModel,
        scheme: SchemeConfig,
        exactness: int | None = None,
    ) -> None:
        if mesh.boundary_kind != model.boundary_kind:
            raise ValueError(
                f"La malla es {mesh.boundary_kind!r} pero el modelo {model.name!r} "
                f"requiere {model.boundary_kind!r}"
            )
        self.mesh = mesh
        self.model = model
        self.scheme = scheme
        self.basis = get_basis(scheme.k)
        if exactness is None:
            exactness = assembly_exactness(scheme.k, model.strongly_nonlinear)
        self.volume_rule = volume_rule(exactness)
        self.edge_rule = edge_rule(exactness)
        self.omega = min_volume_weight(self.volume_rule)

        self._setup_volume()
        self._setup_edges()
        LOGGER.debug(
            "Operador DDG %s k=%d: %d elementos, %d aristas, exactitud %d",
            scheme.variant.value,
            scheme.k,
            mesh.n_elements,
            mesh.n_edges,
            exactness,
        )

    # ------------------------------------------------------------------
    # Precálculo geométrico
    # ------------------------------------------------------------------
    def _setup_volume(self) -> None:
        mesh, rule = self.mesh, self.volume_rule
        self._phi = self.basis.values(rule.points)
        grad_ref = self.basis.gradients(rule.points)
        self._grad = np.einsum("qda,eai->eqdi", grad_ref, mesh.inverse_jacobians)
        self._abs_det = np.abs(mesh.dets)
        self._wdet = rule.weights[None, :] * self._abs_det[:, None]
        self._xq = (
            np.einsum("eij,qj->eqi", mesh.jacobians, rule.points)
            + mesh.element_vertices[:, 0][:, None, :]
        )

    def _side_tables(
        self, ref_points: np.ndarray, elements: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n_edges, n_q, _ = ref_points.shape
        flat = ref_points.reshape(-1, 2)
        nd = self.basis.n_dof
        phi = self.basis.values(flat).reshape(n_edges, n_q, nd)
        grad_ref = self.basis.gradients(flat).reshape(n_edges, n_q, nd, 2)
        hess_ref = self.basis.hessians(flat).reshape(n_edges, n_q, nd, 2, 2)
        inv = self.mesh.inverse_jacobians[elements]
        grad = np.einsum("eqda,eai->eqdi", grad_ref, inv)
        hess = np.einsum("eai,eqdab,ebj->eqdij", inv, hess_ref, inv)
        return phi, grad, hess

    def _setup_edges(self) -> None:
        mesh, scheme = self.mesh, self.scheme
        traces = edge_traces_setup(mesh, self.edge_rule)
        self._traces = traces
        self._owner = mesh.edge_owner
        self._interior = mesh.interior_mask
        self._boundary = ~self._interior
        # En frontera el "vecino" apunta al dueño solo para mantener formas
        self._neighbor = np.where(self._interior, mesh.edge_neighbor, mesh.edge_owner)
        self._normal = mesh.edge_normals[:, None, :]
        self._h = np.broadcast_to(mesh.edge_h[:, None], traces.weights.shape)
        self._wl = traces.weights

        self._phi_own, self._grad_own, self._hess_own = self._side_tables(
            traces.owner_ref, self._owner
        )
        self._phi_nb, self._grad_nb, self._hess_nb = self._side_tables(
            traces.neighbor_ref, self._neighbor
        )

        normal_d = self._normal[:, :, None, :]
        h_d = self._h[:, :, None]
        self._test_own = one_sided_test_flux(
            scheme.variant, self._phi_own, self._grad_own, self._hess_own, normal_d, h_d, scheme
        )
        self._test_nb = one_sided_test_flux(
            scheme.variant, self._phi_nb, self._grad_nb, self._hess_nb, -normal_d, h_d, scheme
        )
        self._boundary_points = traces.physical[self._boundary]

    # ------------------------------------------------------------------
    # Evaluación
    # ------------------------------------------------------------------
    def edge_traces(self, coefficients: np.ndarray, t: float) -> EdgeTrace:
        """Trazas de u en todas las aristas; en frontera Dirichlet usa el estado espejo."""
        c = np.asarray(coefficients, dtype=float)
        co, cn = c[self._owner], c[self._neighbor]
        u_m = np.einsum("eqd,ed->eq", self._phi_own, co)
        g_m = np.einsum("eqdi,ed->eqi", self._grad_own, co)
        h_m = np.einsum("eqdij,ed->eqij", self._hess_own, co)
        u_p = np.einsum("eqd,ed->eq", self._phi_nb, cn)
        g_p = np.einsum("eqdi,ed->eqi", self._grad_nb, cn)
        h_p = np.einsum("eqdij,ed->eqij", self._hess_nb, cn)

        if np.any(self._boundary):
            pts = self._boundary_points
            g = self.model.boundary_value(pts[..., 0], pts[..., 1], t)
            u_p[self._boundary] = 2.0 * g - u_m[self._boundary]
            g_p[self._boundary] = g_m[self._boundary]
            h_p[self._boundary] = h_m[self._boundary]
        return EdgeTrace(u_m, u_p, g_m, g_p, h_m, h_p)

    def residual(self, coefficients: np.ndarray, t: float = 0.0) -> np.ndarray:
        """du/dt = L(u) como coeficientes (nE, n_dof).

        Raises:
            NonFiniteStateError: Si el resultado contiene NaN o infinitos.
        """
        c = np.asarray(coefficients, dtype=float)
        model, scheme = self.model, self.scheme

        # --- Volumen ---
        u_q = c @ self._phi.T
        grad_u = np.einsum("eqdi,ed->eqi", self._grad, c)
        flux = np.einsum("eqij,eqj->eqi", model.diffusion_matrix(u_q), grad_u)
        rhs = -np.einsum("eq,eqi,eqdi->ed", self._wdet, flux, self._grad, optimize=True)
        if model.source is not None:
            s = model.source(u_q, self._xq[..., 0], self._xq[..., 1], t)
            rhs += np.einsum("eq,eq,qd->ed", self._wdet, s, self._phi, optimize=True)

        # --- Aristas ---
        trace = self.edge_traces(c, t)
        flux_hat = gradient_flux(trace, self._normal, self._h, scheme.beta0, scheme.beta1)
        xi = direction_vector(model, trace.average, self._normal)
        f = np.sum(flux_hat * xi, axis=-1)
        g_jump = trace.jump[..., None] * xi

        own = np.einsum("eq,eq,eqd->ed", self._wl, f, self._phi_own, optimize=True)
        nb = -np.einsum("eq,eq,eqd->ed", self._wl, f, self._phi_nb, optimize=True)
        if scheme.sigma != 0:
            own -= scheme.sigma * np.einsum(
                "eq,eqi,eqdi->ed", self._wl, g_jump, self._test_own, optimize=True
            )
            nb -= scheme.sigma * np.einsum(
                "eq,eqi,eqdi->ed", self._wl, g_jump, self._test_nb, optimize=True
            )
        np.add.at(rhs, self._owner, own)
        np.add.at(rhs, self._neighbor[self._interior], nb[self._interior])

        rate = rhs / self._abs_det[:, None]
        if not np.all(np.isfinite(rate)):
            raise NonFiniteStateError(f"Residuo no finito en t={t:.6e}")
        return rate

    __call__ = residual

    # ------------------------------------------------------------------
    # Funcionales
    # ------------------------------------------------------------------
    def values_at_quadrature(self, coefficients: np.ndarray) -> np.ndarray:
        return np.asarray(coefficients) @ self._phi.T

    def energy(self, coefficients: np.ndarray) -> float:
        """∫u² = Σ_K |det J_K| Σ_j c_j²."""
        c = np.asarray(coefficients)
        return float(np.sum(self._abs_det[:, None] * c * c))

    def mass(self, coefficients: np.ndarray) -> float:
        """∫u = Σ_K |K| ū_K."""
        return float(np.sum(0.5 * self._abs_det * cell_averages(coefficients)))

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """Producto L² de dos campos DG."""
        return float(np.sum(self._abs_det[:, None] * np.asarray(a) * np.asarray(b)))


def project_initial(
    mesh: Mesh,
    k: int,
    initial: Callable[[np.ndarray, np.ndarray], np.ndarray],
    exactness: Optional[int] = None,
    time: float = 0.0,
) -> DGField:
    """Proyección L² de U₀ sobre el espacio DG de grado k.

    Raises:
        ValueError: Si la exactitud de la regla es menor que 2k.
    """
    if exactness is None:
        exactness = 2 * k + 1
    if exactness < 2 * k:
        raise ValueError(f"La proyección requiere exactitud ≥ 2k = {2 * k}, recibió {exactness}")
    rule = volume_rule(exactness)
    phi = get_basis(k).values(rule.points)
    xq = np.einsum("eij,qj->eqi", mesh.jacobians, rule.points) + mesh.element_vertices[:, 0][:, None, :]
    values = np.asarray(initial(xq[..., 0], xq[..., 1]), dtype=float)
    coeffs = np.einsum("q,eq,qd->ed", rule.weights, values, phi)
    return DGField(coeffs, k, time)


def assemble_residual(
    field: DGField,
    mesh: Mesh,
    model: DiffusionModel,
    scheme: SchemeConfig,
    t: float | None = None,
    exactness: int | None = None,
) -> np.ndarray:
    """Evalúa L(u) construyendo un operador nuevo (para usos puntuales)."""
    operator = DDGOperator(mesh, model, scheme, exactness)
    return operator.residual(field.coefficients, field.time if t is None else t)
