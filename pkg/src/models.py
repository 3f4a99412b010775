# src/models.py
"""
Catálogo de problemas de difusión u_t = ∇·(A(u)∇u) + S.

Cada `DiffusionModel` declara su matriz de difusión vectorizada, las cotas
γ ≤ λ(A(u)) ≤ γ* sobre el rango de solución declarado, el tipo de frontera,
el dominio, el dato inicial y, cuando existe, la solución exacta y el
término fuente manufacturado.

Modelos disponibles (ver `MODEL_FACTORIES`):
- heat: A = μI, periódico en [0,1]².
- anisotropic / anisotropic_symmetric: A constante no simétrica / simétrica.
- porous_manufactured / porous: A = μγu^(γ−1)I, con o sin fuente manufacturada.
- bumps, block: medio poroso con dato inicial discontinuo o de soporte compacto.
- blowup: A = μ·diag(2, 4.5√u⁺), S = μu².
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from mesh import DIRICHLET, PERIODIC

LOGGER = logging.getLogger(__name__)

DiffusionFn = Callable[[np.ndarray], np.ndarray]
FieldFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
InitialFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
SourceFn = Callable[[np.ndarray, np.ndarray, np.ndarray, float], np.ndarray]

# Muestras del rango de u usadas para acotar γ, γ* y ‖A‖₂
_RANGE_SAMPLES = 65


def zero_boundary(x: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class DiffusionModel:
    """Problema de difusión con sus datos y cotas.

    Attributes:
        name: Nombre del modelo.
        mu: Escala de difusión μ.
        diffusion: A(u) vectorizada: u (...) → (..., 2, 2).
        gamma_bounds: (γ, γ*) sobre `solution_range`.
        boundary_kind: "periodic" o "dirichlet".
        origin, side: Dominio [x0, x0+L] × [y0, y0+L].
        initial_data: U₀(x, y).
        exact_solution: U(x, y, t) o None.
        source: S(u, x, y, t) o None.
        boundary_value: g(x, y, t) para Dirichlet (cero por defecto).
        solution_range: Rango [u_min, u_max] donde valen las cotas.
        invariant_bounds: Cotas [m, M] del principio del máximo, si aplica.
        strongly_nonlinear: Requiere cuadratura 4k+1.
        linear: A no depende de u.
        final_time: T por defecto del ejemplo.
    """

    name: str
    mu: float
    diffusion: DiffusionFn
    gamma_bounds: tuple[float, float]
    boundary_kind: str
    origin: tuple[float, float]
    side: float
    initial_data: InitialFn
    exact_solution: Optional[FieldFn] = None
    source: Optional[SourceFn] = None
    boundary_value: FieldFn = zero_boundary
    solution_range: tuple[float, float] = (-1.0, 1.0)
    invariant_bounds: Optional[tuple[float, float]] = None
    strongly_nonlinear: bool = False
    linear: bool = True
    final_time: float = 1.0

    def diffusion_matrix(self, u: np.ndarray | float) -> np.ndarray:
        """Evalúa A(u); acepta escalares o arreglos y devuelve (..., 2, 2)."""
        return self.diffusion(np.asarray(u, dtype=float))

    def _range_samples(self, u_min: float, u_max: float) -> np.ndarray:
        if self.linear:
            return np.array([0.5 * (u_min + u_max)])
        return np.linspace(u_min, u_max, _RANGE_SAMPLES)

    def max_eigenvalue(self, u_min: float, u_max: float) -> float:
        """Mayor autovalor (parte real) de A(u) sobre [u_min, u_max]."""
        mats = self.diffusion_matrix(self._range_samples(u_min, u_max))
        return float(np.max(np.real(np.linalg.eigvals(mats))))

    @property
    def direction_bound(self) -> float:
        """sup ‖A(u)‖₂ sobre el rango declarado: cota de |ξ·x| / ‖x‖.

        Coincide con γ* cuando A es simétrica.
        """
        mats = self.diffusion_matrix(self._range_samples(*self.solution_range))
        return float(np.max(np.linalg.norm(mats, ord=2, axis=(-2, -1))))

    @property
    def has_exact_solution(self) -> bool:
        return self.exact_solution is not None


# ----------------------------------------------------------------------
# Matrices de difusión
# ----------------------------------------------------------------------
def _constant_diffusion(matrix: np.ndarray) -> DiffusionFn:
    mat = np.asarray(matrix, dtype=float)

    def diffusion(u: np.ndarray) -> np.ndarray:
        return np.broadcast_to(mat, np.shape(u) + (2, 2)).copy()

    return diffusion


def _power(u: np.ndarray, exponent: float) -> np.ndarray:
    """u^e, usando u directamente si e es entero par; si no, max(u, 0)^e."""
    if float(exponent).is_integer() and int(exponent) % 2 == 0:
        return u ** int(exponent)
    return np.maximum(u, 0.0) ** exponent


def _porous_diffusion(mu: float, gamma_exp: float) -> DiffusionFn:
    def diffusion(u: np.ndarray) -> np.ndarray:
        scale = mu * gamma_exp * _power(u, gamma_exp - 1.0)
        out = np.zeros(np.shape(u) + (2, 2))
        out[..., 0, 0] = scale
        out[..., 1, 1] = scale
        return out

    return diffusion


def _porous_gamma_bounds(mu: float, gamma_exp: float, u_range: tuple[float, float]) -> tuple[float, float]:
    samples = mu * gamma_exp * _power(np.linspace(*u_range, _RANGE_SAMPLES), gamma_exp - 1.0)
    return float(samples.min()), float(samples.max())


# ----------------------------------------------------------------------
# Constructores de modelos
# ----------------------------------------------------------------------
def heat_model(mu: float = 0.01) -> DiffusionModel:
    """Ecuación del calor con solución exacta e^(−8π²μt) cos(2π(x+y))."""

    def exact(x, y, t):
        return np.exp(-8.0 * np.pi**2 * mu * t) * np.cos(2.0 * np.pi * (x + y))

    return DiffusionModel(
        name="heat",
        mu=mu,
        diffusion=_constant_diffusion(mu * np.eye(2)),
        gamma_bounds=(mu, mu),
        boundary_kind=PERIODIC,
        origin=(0.0, 0.0),
        side=1.0,
        initial_data=lambda x, y: exact(x, y, 0.0),
        exact_solution=exact,
    )


ANISOTROPIC_MATRIX = np.array([[2.0, 1.0], [2.0, 3.0]])
ANISOTROPIC_SYMMETRIC_MATRIX = np.array([[2.0, 1.5], [1.5, 3.0]])


def anisotropic_model(mu: float = 0.01, symmetric: bool = False) -> DiffusionModel:
    """Difusión anisótropa lineal con A = μ[[2,1],[2,3]] (o su variante simétrica).

    Solución exacta e^(−32π²μt) cos(2πy) cos(4πx − 2πy).
    """
    matrix = ANISOTROPIC_SYMMETRIC_MATRIX if symmetric else ANISOTROPIC_MATRIX

    def exact(x, y, t):
        return (
            np.exp(-32.0 * np.pi**2 * mu * t)
            * np.cos(2.0 * np.pi * y)
            * np.cos(4.0 * np.pi * x - 2.0 * np.pi * y)
        )

    eig = np.real(np.linalg.eigvals(mu * matrix))
    return DiffusionModel(
        name="anisotropic_symmetric" if symmetric else "anisotropic",
        mu=mu,
        diffusion=_constant_diffusion(mu * matrix),
        gamma_bounds=(float(eig.min()), float(eig.max())),
        boundary_kind=PERIODIC,
        origin=(0.0, 0.0),
        side=1.0,
        initial_data=lambda x, y: exact(x, y, 0.0),
        exact_solution=exact,
    )


def _integer_safe_power(u: np.ndarray, exponent: float) -> np.ndarray:
    if float(exponent).is_integer():
        return u ** int(exponent)
    return np.maximum(u, 0.0) ** exponent


def porous_medium_model(
    mu: float = 0.01, gamma_exp: float = 3.0, manufactured: bool = True
) -> DiffusionModel:
    """Medio poroso u_t = μΔ(u^γ) con solución manufacturada U = e^(−8π²μt) sin(2π(x+y)).

    Con E = e^(−8π²μt) y c = cos(2π(x+y)), para γ = 3 el término fuente es

        S = −8π²μU + 24π²μU³ − 48π²μ U E² c²

    y para otros γ se usa S = U_t − μΔ(U^γ) en forma cerrada. Si
    `manufactured` es falso el modelo no lleva fuente ni solución exacta.
    """

    def exact(x, y, t):
        return np.exp(-8.0 * np.pi**2 * mu * t) * np.sin(2.0 * np.pi * (x + y))

    def source(u, x, y, t):
        decay = np.exp(-8.0 * np.pi**2 * mu * t)
        c = np.cos(2.0 * np.pi * (x + y))
        big_u = exact(x, y, t)
        if gamma_exp == 3.0:
            return (
                -8.0 * np.pi**2 * mu * big_u
                + 24.0 * np.pi**2 * mu * big_u**3
                - 48.0 * np.pi**2 * mu * big_u * decay**2 * c**2
            )
        # Δ = 2 d²/dξ² sobre ξ = x + y
        du = 2.0 * np.pi * decay * c
        lap = 2.0 * gamma_exp * (
            (gamma_exp - 1.0) * _integer_safe_power(big_u, gamma_exp - 2.0) * du**2
            - 4.0 * np.pi**2 * _integer_safe_power(big_u, gamma_exp)
        )
        return -8.0 * np.pi**2 * mu * big_u - mu * lap

    u_range = (-1.0, 1.0)
    return DiffusionModel(
        name="porous_manufactured" if manufactured else "porous",
        mu=mu,
        diffusion=_porous_diffusion(mu, gamma_exp),
        gamma_bounds=_porous_gamma_bounds(mu, gamma_exp, u_range),
        boundary_kind=PERIODIC,
        origin=(0.0, 0.0),
        side=1.0,
        initial_data=lambda x, y: exact(x, y, 0.0),
        exact_solution=exact if manufactured else None,
        source=source if manufactured else None,
        solution_range=u_range,
        strongly_nonlinear=True,
        linear=False,
    )


def merging_bumps_model(mu: float = 1.0, gamma_exp: float = 2.0) -> DiffusionModel:
    """Dos bultos de soporte compacto que se unen (medio poroso, γ = 2).

    U₀ = e^(−1/(6 − (x−2)² − (y+2)²)) dentro del disco de radio √6 centrado en
    (2, −2), lo mismo en (−2, 2), y cero fuera. Dominio [−10, 10]², Dirichlet cero.
    """

    def bump(x, y, cx, cy):
        r2 = (x - cx) ** 2 + (y - cy) ** 2
        inside = r2 < 6.0
        denom = np.where(inside, 6.0 - r2, 1.0)
        return np.where(inside, np.exp(-1.0 / denom), 0.0)

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return bump(x, y, 2.0, -2.0) + bump(x, y, -2.0, 2.0)

    u_range = (0.0, 1.0)
    return DiffusionModel(
        name="bumps",
        mu=mu,
        diffusion=_porous_diffusion(mu, gamma_exp),
        gamma_bounds=_porous_gamma_bounds(mu, gamma_exp, u_range),
        boundary_kind=DIRICHLET,
        origin=(-10.0, -10.0),
        side=20.0,
        initial_data=initial,
        solution_range=u_range,
        invariant_bounds=(0.0, 1.0),
        strongly_nonlinear=True,
        linear=False,
        final_time=4.0,
    )


def square_block_model(mu: float = 1.0, gamma_exp: float = 2.0) -> DiffusionModel:
    """Bloque cuadrado: U₀ = 1 en [−½, ½]² y 0 en el resto de [−1, 1]²."""

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return np.where((np.abs(x) <= 0.5) & (np.abs(y) <= 0.5), 1.0, 0.0)

    u_range = (0.0, 1.0)
    return DiffusionModel(
        name="block",
        mu=mu,
        diffusion=_porous_diffusion(mu, gamma_exp),
        gamma_bounds=_porous_gamma_bounds(mu, gamma_exp, u_range),
        boundary_kind=DIRICHLET,
        origin=(-1.0, -1.0),
        side=2.0,
        initial_data=initial,
        solution_range=u_range,
        invariant_bounds=(0.0, 1.0),
        strongly_nonlinear=True,
        linear=False,
        final_time=0.005,
    )


def blowup_model(mu: float = 1.0) -> DiffusionModel:
    """Explosión en tiempo finito: A = μ·diag(2, 4.5√u⁺), S = μu², U₀ = 200 sin(πx) sin(πy)."""

    def diffusion(u: np.ndarray) -> np.ndarray:
        out = np.zeros(np.shape(u) + (2, 2))
        out[..., 0, 0] = 2.0 * mu
        out[..., 1, 1] = 4.5 * mu * np.sqrt(np.maximum(u, 0.0))
        return out

    def source(u, x, y, t):
        return mu * u**2

    def initial(x, y):
        return 200.0 * np.sin(np.pi * np.asarray(x)) * np.sin(np.pi * np.asarray(y))

    u_range = (0.0, 200.0)
    return DiffusionModel(
        name="blowup",
        mu=mu,
        diffusion=diffusion,
        gamma_bounds=(0.0, float(max(2.0, 4.5 * np.sqrt(u_range[1])) * mu)),
        boundary_kind=DIRICHLET,
        origin=(0.0, 0.0),
        side=1.0,
        initial_data=initial,
        source=source,
        solution_range=u_range,
        invariant_bounds=(0.0, np.inf),
        linear=False,
        final_time=0.05,
    )


MODEL_FACTORIES: dict[str, Callable[..., DiffusionModel]] = {
    "heat": heat_model,
    "anisotropic": anisotropic_model,
    "anisotropic_symmetric": lambda mu=0.01: anisotropic_model(mu, symmetric=True),
    "porous_manufactured": porous_medium_model,
    "porous": lambda mu=0.01, gamma_exp=3.0: porous_medium_model(mu, gamma_exp, manufactured=False),
    "bumps": merging_bumps_model,
    "block": square_block_model,
    "blowup": blowup_model,
}


def build_model(name: str, mu: float | None = None, gamma_exp: float | None = None) -> DiffusionModel:
    """Construye un modelo por nombre con μ y exponente opcionales.

    Raises:
        ValueError: Si el nombre no está registrado.
    """
    try:
        factory = MODEL_FACTORIES[name]
    except KeyError:
        known = ", ".join(sorted(MODEL_FACTORIES))
        raise ValueError(f"Modelo desconocido: {name!r} (disponibles: {known})") from None

    kwargs: dict[str, float] = {}
    if mu is not None:
        kwargs["mu"] = float(mu)
    if gamma_exp is not None:
        if name not in ("porous_manufactured", "porous", "bumps", "block"):
            raise ValueError(f"El modelo {name!r} no admite exponente γ")
        kwargs["gamma_exp"] = float(gamma_exp)
    model = factory(**kwargs)
    LOGGER.debug("Modelo %s (μ=%g, γ=%s)", model.name, model.mu, model.gamma_bounds)
    return model
