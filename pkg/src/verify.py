# src/verify.py
"""
Batería de verificación de invariantes del solver DDG.

Cada chequeo devuelve un `CheckResult` con el valor medido y la tolerancia:

- Exactitud de las reglas de cuadratura (monomios en el triángulo y en [0, 1]).
- Ortonormalidad de la base para k = 0…4.
- Conteos y geometría de mallas periódicas y Dirichlet.
- Limitador: conserva promedios, respeta cotas y es idempotente.
- Residuo nulo de campos constantes (todas las variantes).
- Consistencia: un campo lineal con datos de frontera exactos es estacionario.
- Consistencia del flujo: ∇̂u = ∇u en las aristas para polinomios globales de grado ≤ k.
- Conservación: Σ_K |K| dū_K/dt = 0 en mallas periódicas.
- Identidad adjunta: A({u})∇̂u·n = ∇̂u·ξ({u}) punto a punto en las aristas.
- Simetría: la variante simétrica cumple ⟨v, L(u)⟩ = ⟨u, L(v)⟩ con A constante.
- Residuo vectorizado contra un ensamblaje elemento a elemento con bucles.
- Cota del vector de dirección |ξ·x| ≤ γ*‖x‖.

`energy_stability_study` agrega el estudio aleatorio de estabilidad de energía.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from basis import AffineMap, get_basis, n_dof, physical_derivatives
from ddg import (
    DDGOperator,
    EdgeTrace,
    SchemeConfig,
    Variant,
    cell_averages,
    direction_vector,
    gradient_flux,
    project_initial,
    test_flux,
)
from limiter import LimiterConfig, ScalingLimiter
from mesh import DIRICHLET, PERIODIC, Mesh, build_uniform_mesh, edge_traces_setup
from models import MODEL_FACTORIES, DiffusionModel, build_model, heat_model, zero_boundary
from quadrature import MAX_EXACTNESS, edge_rule, volume_rule
from timestep import compute_dt, ssp_rk3_step

LOGGER = logging.getLogger(__name__)

ALL_VARIANTS = tuple(Variant)


@dataclass
class CheckResult:
    """Resultado de un chequeo individual."""

    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def as_line(self) -> str:
        mark = "OK " if self.passed else "FALLA"
        return f"[{mark}] {self.name}: {self.value:.3e} (tol {self.tolerance:.1e}) {self.detail}".rstrip()


def _check(name: str, value: float, tolerance: float, detail: str = "") -> CheckResult:
    passed = bool(np.isfinite(value) and value <= tolerance)
    return CheckResult(name, passed, float(value), float(tolerance), detail)


# ----------------------------------------------------------------------
# Cuadratura y base
# ----------------------------------------------------------------------
def check_quadrature(max_exactness: int = MAX_EXACTNESS) -> CheckResult:
    """Error relativo máximo al integrar x^a y^b (a+b ≤ exactitud) y s^m en [0, 1]."""
    worst = 0.0
    for exactness in range(1, max_exactness + 1):
        rule = volume_rule(exactness)
        x, y = rule.points[:, 0], rule.points[:, 1]
        for a in range(exactness + 1):
            for b in range(exactness + 1 - a):
                exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
                approx = float(np.sum(rule.weights * x**a * y**b))
                worst = max(worst, abs(approx - exact) / exact)
        line = edge_rule(exactness)
        for m in range(exactness + 1):
            approx = float(np.sum(line.weights * line.points**m))
            worst = max(worst, abs(approx - 1.0 / (m + 1)) * (m + 1))
    return _check("cuadratura", worst, 1e-12, f"exactitud 1..{max_exactness}")


def check_basis_orthonormality(max_degree: int = 4) -> CheckResult:
    worst = 0.0
    for k in range(max_degree + 1):
        rule = volume_rule(2 * k)
        phi = get_basis(k).values(rule.points)
        gram = np.einsum("q,qi,qj->ij", rule.weights, phi, phi)
        worst = max(worst, float(np.max(np.abs(gram - np.eye(n_dof(k))))))
    return _check("base ortonormal", worst, 1e-12, f"k=0..{max_degree}")


def check_mesh(n: int = 5) -> CheckResult:
    """Aristas 3n² (periódica) y 3n²+2n (Dirichlet); áreas suman el dominio."""
    periodic = build_uniform_mesh(n, boundary_kind=PERIODIC)
    dirichlet = build_uniform_mesh(n, boundary_kind=DIRICHLET)
    count_error = abs(periodic.n_edges - 3 * n * n) + abs(dirichlet.n_edges - (3 * n * n + 2 * n))
    area_error = abs(float(np.sum(periodic.areas)) - periodic.side**2)
    boundary_error = abs(int(np.sum(~dirichlet.interior_mask)) - 4 * n) + int(np.sum(~periodic.interior_mask))
    return _check(
        "malla",
        float(count_error + boundary_error) + area_error,
        1e-12,
        f"n={n}: {periodic.n_edges} / {dirichlet.n_edges} aristas",
    )


# ----------------------------------------------------------------------
# Campos de prueba
# ----------------------------------------------------------------------
def random_projection(
    mesh: Mesh, k: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0
) -> np.ndarray:
    """Proyección L² de valores aleatorios en [low, high] en cada punto de cuadratura."""
    rule = volume_rule(2 * k + 1)
    phi = get_basis(k).values(rule.points)
    values = rng.uniform(low, high, size=(mesh.n_elements, rule.n_points))
    return np.einsum("q,eq,qd->ed", rule.weights, values, phi)


def _constant_coefficients(mesh: Mesh, k: int, value: float) -> np.ndarray:
    c = np.zeros((mesh.n_elements, n_dof(k)))
    c[:, 0] = value / np.sqrt(2.0)
    return c


def linear_dirichlet_model(mu: float = 1.0) -> DiffusionModel:
    """A = μ[[2,1],[1,3]] sobre [0,1]² con U = g = x + 2y (estacionaria)."""
    matrix = mu * np.array([[2.0, 1.0], [1.0, 3.0]])

    def exact(x, y, t):
        return np.asarray(x, dtype=float) + 2.0 * np.asarray(y, dtype=float)

    return DiffusionModel(
        name="linear_dirichlet",
        mu=mu,
        diffusion=lambda u: np.broadcast_to(matrix, np.shape(u) + (2, 2)),
        gamma_bounds=tuple(float(v) for v in np.linalg.eigvalsh(matrix)),
        boundary_kind=DIRICHLET,
        origin=(0.0, 0.0),
        side=1.0,
        initial_data=lambda x, y: exact(x, y, 0.0),
        exact_solution=exact,
        boundary_value=exact,
    )


# ----------------------------------------------------------------------
# Limitador
# ----------------------------------------------------------------------
def check_limiter(k: int = 2, n: int = 4, seed: int = 0) -> CheckResult:
    """Conservación de promedios, cotas [0, 1] en las muestras e idempotencia."""
    rng = np.random.default_rng(seed)
    mesh = build_uniform_mesh(n)
    c = random_projection(mesh, k, rng, 0.0, 1.0)
    c[:, 1:] *= 4.0
    ex = 2 * k + 1
    limiter = ScalingLimiter(k, volume_rule(ex), edge_rule(ex), LimiterConfig(0.0, 1.0))
    once = limiter.apply(c)
    twice = limiter.apply(once)
    samples = limiter.sample(once)
    average_drift = float(np.max(np.abs(cell_averages(once) - cell_averages(c))))
    overshoot = float(max(0.0, samples.max() - 1.0, -samples.min()))
    idempotence = float(np.max(np.abs(twice - once)))
    return _check(
        "limitador",
        max(average_drift, overshoot, idempotence),
        1e-12,
        f"deriva ū={average_drift:.1e}, exceso={overshoot:.1e}, idempotencia={idempotence:.1e}",
    )


# ----------------------------------------------------------------------
# Operador DDG
# ----------------------------------------------------------------------
def _operator(model: DiffusionModel, variant: Variant, k: int, n: int) -> DDGOperator:
    mesh = build_uniform_mesh(n, side=model.side, origin=model.origin, boundary_kind=model.boundary_kind)
    return DDGOperator(mesh, model, SchemeConfig.with_defaults(variant, k))


def check_constant_residual(k: int = 2, n: int = 3) -> CheckResult:
    """L(c) = 0 para campos constantes, todas las variantes, modelo lineal y poroso."""
    worst = 0.0
    for model in (heat_model(0.01), build_model("porous", 0.01)):
        for variant in ALL_VARIANTS:
            op = _operator(model, variant, k, n)
            rate = op.residual(_constant_coefficients(op.mesh, k, 0.7))
            worst = max(worst, float(np.max(np.abs(rate))))
    return _check("residuo de constantes", worst, 1e-12, f"k={k}, n={n}")


def check_linear_consistency(k: int = 2, n: int = 3) -> CheckResult:
    """Un campo lineal exacto con frontera Dirichlet exacta tiene residuo nulo."""
    model = linear_dirichlet_model()
    worst = 0.0
    for variant in ALL_VARIANTS:
        op = _operator(model, variant, k, n)
        rule = volume_rule(2 * k + 1)
        phi = get_basis(k).values(rule.points)
        xq = op.mesh.element_vertices[:, 0][:, None, :] + np.einsum("eij,qj->eqi", op.mesh.jacobians, rule.points)
        c = np.einsum("q,eq,qd->ed", rule.weights, model.initial_data(xq[..., 0], xq[..., 1]), phi)
        worst = max(worst, float(np.max(np.abs(op.residual(c)))))
    return _check("consistencia lineal", worst, 1e-10, f"k={k}, n={n}")


PolynomialField = tuple[Callable[..., np.ndarray], Callable[..., tuple[np.ndarray, np.ndarray]]]


def polynomial_fields(degree: int) -> list[PolynomialField]:
    """Polinomios globales de grado ≤ degree junto con su gradiente exacto."""
    fields: list[PolynomialField] = [
        (lambda x, y: x + 2.0 * y, lambda x, y: (np.ones_like(x), np.full_like(x, 2.0))),
    ]
    if degree >= 2:
        fields.append((lambda x, y: x**2 + x * y - y**2, lambda x, y: (2.0 * x + y, x - 2.0 * y)))
    if degree >= 3:
        fields.append(
            (
                lambda x, y: x**3 - 3.0 * x * y**2 + y,
                lambda x, y: (3.0 * x**2 - 3.0 * y**2, 1.0 - 6.0 * x * y),
            )
        )
    return fields


def _polynomial_model(poly: Callable[..., np.ndarray]) -> DiffusionModel:
    def exact(x, y, t):
        return poly(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    return replace(
        linear_dirichlet_model(),
        name="polynomial_dirichlet",
        initial_data=poly,
        exact_solution=exact,
        boundary_value=exact,
    )


def check_polynomial_flux_consistency(k: int = 2, n: int = 2) -> CheckResult:
    """∇̂u = ∇u en todos los puntos de arista para polinomios globales de grado ≤ k.

    La frontera es Dirichlet con g igual al polinomio, así el estado espejo
    repite la traza interior. Con k < 2 se usa k = 2 para que el término
    β₁h⟦Hn⟧ y el promedio {∇u} vean datos curvos.
    """
    degree = max(k, 2)
    worst = 0.0
    for poly, grad in polynomial_fields(degree):
        model = _polynomial_model(poly)
        for variant in ALL_VARIANTS:
            op = _operator(model, variant, degree, n)
            c = project_initial(op.mesh, degree, poly).coefficients
            trace = op.edge_traces(c, 0.0)
            normal = op.mesh.edge_normals[:, None, :]
            flux_hat = gradient_flux(trace, normal, op.mesh.edge_h[:, None], op.scheme.beta0, op.scheme.beta1)
            pts = edge_traces_setup(op.mesh, op.edge_rule).physical
            exact = np.stack(grad(pts[..., 0], pts[..., 1]), axis=-1)
            scale = max(1.0, float(np.max(np.abs(exact))))
            worst = max(worst, float(np.max(np.abs(flux_hat - exact))) / scale)
    return _check("consistencia del flujo", worst, 1e-12, f"grado ≤ {degree}, n={n}")


def check_flux_identity(k: int = 2, n: int = 3, seed: int = 0) -> CheckResult:
    """A({u})∇̂u·n = ∇̂u·ξ({u}) en cada punto de cuadratura de arista, para todos los modelos."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in MODEL_FACTORIES:
        model = build_model(name)
        op = _operator(model, Variant.DDGIC, k, n)
        c = random_projection(op.mesh, k, rng, *model.solution_range)
        trace = op.edge_traces(c, 0.0)
        normal = np.broadcast_to(op.mesh.edge_normals[:, None, :], trace.grad_minus.shape)
        flux_hat = gradient_flux(trace, normal, op.mesh.edge_h[:, None], op.scheme.beta0, op.scheme.beta1)
        mats = model.diffusion_matrix(trace.average)
        lhs = np.einsum("eqij,eqj,eqi->eq", mats, flux_hat, normal)
        rhs = np.sum(flux_hat * direction_vector(model, trace.average, normal), axis=-1)
        scale = np.maximum(1.0, np.linalg.norm(mats, axis=(-2, -1)) * np.linalg.norm(flux_hat, axis=-1))
        worst = max(worst, float(np.max(np.abs(lhs - rhs) / scale)))
    return _check("identidad adjunta", worst, 1e-13, f"k={k}, n={n}, {len(MODEL_FACTORIES)} modelos")


def check_conservation(k: int = 2, n: int = 3, seed: int = 0) -> CheckResult:
    """Σ_K |K| dū_K/dt = 0 en malla periódica (sin fuente)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for model in (heat_model(0.01), build_model("anisotropic", 0.01), build_model("porous", 0.01)):
        for variant in ALL_VARIANTS:
            op = _operator(model, variant, k, n)
            c = random_projection(op.mesh, k, rng, 0.0, 1.0)
            rate = op.residual(c)
            scale = max(1.0, float(np.sum(np.abs(rate) * np.abs(op.mesh.dets)[:, None])))
            worst = max(worst, abs(op.mass(rate)) / scale)
    return _check("conservación", worst, 1e-12, f"k={k}, n={n}")


def check_symmetric_form(k: int = 2, n: int = 3, seed: int = 0) -> CheckResult:
    """⟨v, L(u)⟩ = ⟨u, L(v)⟩ para la variante simétrica con A constante y simétrica."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for model in (heat_model(0.01), build_model("anisotropic_symmetric", 0.01)):
        op = _operator(model, Variant.SYMMETRIC, k, n)
        u = random_projection(op.mesh, k, rng)
        v = random_projection(op.mesh, k, rng)
        lhs, rhs = op.inner(v, op.residual(u)), op.inner(u, op.residual(v))
        worst = max(worst, abs(lhs - rhs) / max(1e-300, abs(lhs) + abs(rhs)))
    return _check("simetría de la forma", worst, 1e-11, f"k={k}, n={n}")


def brute_force_residual(
    mesh: Mesh,
    model: DiffusionModel,
    scheme: SchemeConfig,
    coefficients: np.ndarray,
    t: float = 0.0,
    exactness: Optional[int] = None,
) -> np.ndarray:
    """Residuo DDG ensamblado punto a punto con bucles explícitos.

    Usa los objetos `Edge` de la malla y el flujo test general (con la traza
    exterior nula), no las tablas precalculadas del operador.
    """
    k = scheme.k
    basis = get_basis(k)
    if exactness is None:
        exactness = 2 * k + 1
    vol, line = volume_rule(exactness), edge_rule(exactness)
    c = np.asarray(coefficients, dtype=float)
    rhs = np.zeros_like(c)
    maps = [AffineMap.from_vertices(e, mesh.element_vertices[e]) for e in range(mesh.n_elements)]

    def local(element: int, point: np.ndarray):
        amap = maps[element]
        ref = amap.to_reference(point[None, :])
        phi = basis.values(ref)[0]
        grad, hess = physical_derivatives(amap, basis.gradients(ref)[0], basis.hessians(ref)[0])
        return phi, grad, hess

    for e, amap in enumerate(maps):
        for r, w in zip(vol.points, vol.weights):
            x = amap.to_physical(r[None, :])[0]
            phi, grad, _ = local(e, x)
            u = phi @ c[e]
            grad_u = grad.T @ c[e]
            flux = model.diffusion_matrix(u) @ grad_u
            for j in range(basis.n_dof):
                rhs[e, j] -= w * abs(amap.det) * flux @ grad[j]
            if model.source is not None:
                s = float(model.source(np.array(u), np.array(x[0]), np.array(x[1]), t))
                rhs[e] += w * abs(amap.det) * s * phi

    for edge in mesh.edges:
        local_vertices = mesh.element_vertices[edge.owner]
        a, b = local_vertices[edge.owner_local], local_vertices[(edge.owner_local + 1) % 3]
        for s, w in zip(line.points, line.weights):
            x = a + s * (b - a)
            phi_m, grad_m, hess_m = local(edge.owner, x)
            u_m, g_m, h_m = phi_m @ c[edge.owner], grad_m.T @ c[edge.owner], np.einsum("dij,d->ij", hess_m, c[edge.owner])
            if edge.is_boundary:
                g = float(model.boundary_value(np.array(x[0]), np.array(x[1]), t))
                u_p, g_p, h_p = 2.0 * g - u_m, g_m, h_m
                sides = [(edge.owner, phi_m, grad_m, hess_m, u_m, g_m, h_m, u_p, g_p, h_p, edge.normal)]
            else:
                phi_p, grad_p, hess_p = local(edge.neighbor, x + edge.shift)
                cn = c[edge.neighbor]
                u_p, g_p, h_p = phi_p @ cn, grad_p.T @ cn, np.einsum("dij,d->ij", hess_p, cn)
                sides = [
                    (edge.owner, phi_m, grad_m, hess_m, u_m, g_m, h_m, u_p, g_p, h_p, edge.normal),
                    (edge.neighbor, phi_p, grad_p, hess_p, u_p, g_p, h_p, u_m, g_m, h_m, -edge.normal),
                ]
            for elem, phi, grad, hess, ui, gi, hi, uo, go, ho, normal in sides:
                trace = EdgeTrace(np.array(ui), np.array(uo), gi, go, hi, ho)
                flux_hat = gradient_flux(trace, normal, edge.h_e, scheme.beta0, scheme.beta1)
                xi = direction_vector(model, trace.average, normal)
                f = float(flux_hat @ xi)
                for j in range(basis.n_dof):
                    rhs[elem, j] += w * edge.length * f * phi[j]
                    if scheme.sigma != 0:
                        v_trace = EdgeTrace.one_sided(np.array(phi[j]), grad[j], hess[j])
                        tflux = test_flux(scheme.variant, v_trace, normal, edge.h_e, scheme)
                        rhs[elem, j] -= scheme.sigma * w * edge.length * float(trace.jump) * float(xi @ tflux)

    return rhs / np.abs(mesh.dets)[:, None]


def check_brute_force(k: int = 2, seed: int = 0) -> CheckResult:
    """Operador vectorizado contra `brute_force_residual` en mallas n = 1 y n = 2."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    cases = [
        (build_model("anisotropic", 0.01), 1),
        (build_model("porous", 0.01), 2),
        (linear_dirichlet_model(), 1),
        (build_model("bumps", 1.0), 1),
    ]
    for model, n in cases:
        for variant in ALL_VARIANTS:
            op = _operator(model, variant, k, n)
            c = random_projection(op.mesh, k, rng, 0.0, 1.0)
            fast = op.residual(c, 0.1)
            slow = brute_force_residual(op.mesh, model, op.scheme, c, 0.1, op.volume_rule.exactness)
            scale = max(1.0, float(np.max(np.abs(slow))))
            worst = max(worst, float(np.max(np.abs(fast - slow))) / scale)
    return _check("residuo vs. bucles", worst, 1e-11, f"k={k}")


def check_direction_bound(samples: int = 10_000, seed: int = 0) -> CheckResult:
    """max |ξ(u)·x| / (γ*‖x‖) con `samples` ternas aleatorias (u, n, x) por modelo.

    u se toma uniforme en el rango de solución declarado de cada modelo.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in MODEL_FACTORIES:
        model = build_model(name)
        lo, hi = model.solution_range
        u = rng.uniform(lo, hi, samples)
        angle = rng.uniform(0.0, 2.0 * np.pi, samples)
        normal = np.column_stack((np.cos(angle), np.sin(angle)))
        x = rng.standard_normal((samples, 2))
        xi = direction_vector(model, u, normal)
        ratio = np.abs(np.sum(xi * x, axis=1)) / (model.direction_bound * np.linalg.norm(x, axis=1))
        worst = max(worst, float(np.max(ratio)))
    return _check(
        "cota de ξ", max(0.0, worst - 1.0), 1e-12, f"max razón={worst:.6f}, {samples} muestras por modelo"
    )


def run_checks(k: int = 2) -> list[CheckResult]:
    """Ejecuta la batería completa y devuelve los resultados en orden."""
    checks: list[Callable[[], CheckResult]] = [
        check_quadrature,
        check_basis_orthonormality,
        check_mesh,
        lambda: check_limiter(k),
        lambda: check_constant_residual(k),
        lambda: check_linear_consistency(k),
        lambda: check_conservation(k),
        lambda: check_polynomial_flux_consistency(k),
        lambda: check_flux_identity(k),
        lambda: check_symmetric_form(k),
        lambda: check_brute_force(k),
        check_direction_bound,
    ]
    results = []
    for check in checks:
        try:
            result = check()
        except Exception as e:
            result = CheckResult(getattr(check, "__name__", "chequeo"), False, math.nan, 0.0, f"error: {e}")
        LOGGER.info(result.as_line())
        results.append(result)
    return results


# ----------------------------------------------------------------------
# Estabilidad de energía
# ----------------------------------------------------------------------
@dataclass
class StabilityReport:
    """Resumen del estudio aleatorio de estabilidad de energía."""

    model: str
    variant: str
    k: int
    n: int
    trials: int
    steps: int
    max_semi_discrete_ratio: float = -math.inf
    max_energy_growth: float = -math.inf
    semi_discrete_ok: bool = True
    fully_discrete_ok: bool = True
    energies: list[float] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.semi_discrete_ok and self.fully_discrete_ok


def energy_stability_study(
    model: DiffusionModel,
    variant: "str | Variant",
    k: int = 2,
    n: int = 5,
    trials: int = 20,
    steps: int = 100,
    seed: int = 0,
    cfl: float = 0.1,
) -> StabilityReport:
    """Proyecciones aleatorias: ∫u·L(u) ≤ 1e−10‖u‖² y ∫u² no creciente con SSP-RK3.

    Se usa el problema homogéneo (sin fuente, g = 0) y valores aleatorios en
    el rango declarado del modelo.
    """
    homogeneous = replace(model, source=None, boundary_value=zero_boundary)
    scheme = SchemeConfig.with_defaults(variant, k)
    mesh = build_uniform_mesh(n, side=model.side, origin=model.origin, boundary_kind=model.boundary_kind)
    op = DDGOperator(mesh, homogeneous, scheme)
    lo, hi = model.solution_range
    if not np.isfinite(hi):
        hi = lo + 1.0
    rng = np.random.default_rng(seed)
    report = StabilityReport(model.name, scheme.variant.value, k, n, trials, steps)

    for trial in range(trials):
        u = random_projection(mesh, k, rng, lo, hi)
        norm2 = op.energy(u)
        ratio = op.inner(u, op.residual(u)) / norm2
        report.max_semi_discrete_ratio = max(report.max_semi_discrete_ratio, ratio)
        if ratio > 1e-10:
            report.semi_discrete_ok = False

        energy = norm2
        for _ in range(steps):
            values = op.values_at_quadrature(u)
            dt = compute_dt(mesh, homogeneous, op.omega, cfl, u_range=(float(values.min()), float(values.max())))
            u = ssp_rk3_step(u, dt, op)
            new_energy = op.energy(u)
            growth = (new_energy - energy) / energy if energy > 0 else 0.0
            report.max_energy_growth = max(report.max_energy_growth, growth)
            if growth > 1e-10:
                report.fully_discrete_ok = False
            energy = new_energy
        report.energies.append(energy)
        LOGGER.debug("Ensayo %d: razón=%.3e energía final=%.6e", trial, ratio, energy)

    LOGGER.info(
        "%s Estabilidad %s/%s k=%d: max ⟨u,L(u)⟩/‖u‖²=%.3e, max crecimiento=%.3e",
        "✅" if report.passed else "❌",
        report.model,
        report.variant,
        k,
        report.max_semi_discrete_ratio,
        report.max_energy_growth,
    )
    return report
