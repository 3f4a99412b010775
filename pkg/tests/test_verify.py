# tests/test_verify.py
"""
Tests para verify.py

Prueba:
- Cada chequeo de la batería pasa en mallas pequeñas
- El ensamblaje con bucles coincide con el operador vectorizado
- Los errores dentro de un chequeo se reportan como FALLA
- Estudio de estabilidad de energía (semi-discreto)
"""

import inspect
import math
from dataclasses import replace

import numpy as np
import pytest

import verify
from ddg import DDGOperator, SchemeConfig, direction_vector, gradient_flux, project_initial
from mesh import DIRICHLET, build_uniform_mesh, edge_traces_setup
from models import MODEL_FACTORIES, build_model
from verify import (
    CheckResult,
    brute_force_residual,
    check_basis_orthonormality,
    check_brute_force,
    check_conservation,
    check_constant_residual,
    check_direction_bound,
    check_flux_identity,
    check_limiter,
    check_linear_consistency,
    check_mesh,
    check_polynomial_flux_consistency,
    check_quadrature,
    check_symmetric_form,
    energy_stability_study,
    linear_dirichlet_model,
    polynomial_fields,
    random_projection,
    run_checks,
)


def test_check_result_line():
    ok = CheckResult("malla", True, 0.0, 1e-12)
    bad = CheckResult("limitador", False, 1.0, 1e-12, "exceso")
    assert ok.as_line().startswith("[OK ] malla")
    assert bad.as_line().startswith("[FALLA] limitador")
    assert bad.as_line().endswith("exceso")


@pytest.mark.parametrize(
    "check",
    [
        lambda: check_quadrature(10),
        check_basis_orthonormality,
        lambda: check_mesh(3),
        lambda: check_limiter(1, 3),
        lambda: check_constant_residual(1, 2),
        lambda: check_linear_consistency(1, 2),
        lambda: check_conservation(1, 2),
        lambda: check_symmetric_form(1, 2),
        lambda: check_polynomial_flux_consistency(1, 2),
        lambda: check_flux_identity(1, 2),
        lambda: check_direction_bound(50),
    ],
)
def test_individual_checks_pass(check):
    result = check()
    assert result.passed, result.as_line()


def test_brute_force_matches_operator():
    result = check_brute_force(1)
    assert result.passed, result.as_line()


def test_brute_force_residual_direct(rng):
    model = linear_dirichlet_model()
    mesh = build_uniform_mesh(1, boundary_kind=model.boundary_kind)
    scheme = SchemeConfig.with_defaults("symmetric", 2)
    op = DDGOperator(mesh, model, scheme)
    c = random_projection(mesh, 2, rng)
    np.testing.assert_allclose(brute_force_residual(mesh, model, scheme, c), op.residual(c), atol=1e-11)


def test_linear_dirichlet_model_is_stationary():
    model = linear_dirichlet_model(0.5)
    assert model.exact_solution(1.0, 1.0, 3.0) == pytest.approx(3.0)
    np.testing.assert_allclose(model.diffusion_matrix(0.0), 0.5 * np.array([[2.0, 1.0], [1.0, 3.0]]))


@pytest.mark.parametrize("variant", ["ddgic", "symmetric", "nonsymmetric"])
def test_gradient_flux_reproduces_quadratic_gradient(variant):
    """Test ∇̂u = ∇u en las aristas para u = x² + xy − y² (k=2, frontera exacta)."""

    def quadratic(x, y):
        return x**2 + x * y - y**2

    model = replace(
        linear_dirichlet_model(),
        initial_data=quadratic,
        boundary_value=lambda x, y, t: quadratic(np.asarray(x), np.asarray(y)),
    )
    mesh = build_uniform_mesh(2, boundary_kind=DIRICHLET)
    op = DDGOperator(mesh, model, SchemeConfig.with_defaults(variant, 2))
    c = project_initial(mesh, 2, quadratic).coefficients
    trace = op.edge_traces(c, 0.0)
    flux_hat = gradient_flux(
        trace, mesh.edge_normals[:, None, :], mesh.edge_h[:, None], op.scheme.beta0, op.scheme.beta1
    )
    pts = edge_traces_setup(mesh, op.edge_rule).physical
    x, y = pts[..., 0], pts[..., 1]
    np.testing.assert_allclose(flux_hat[..., 0], 2.0 * x + y, atol=1e-12)
    np.testing.assert_allclose(flux_hat[..., 1], x - 2.0 * y, atol=1e-12)
    np.testing.assert_allclose(trace.jump, 0.0, atol=1e-13)


def test_polynomial_flux_consistency_cubic():
    assert len(polynomial_fields(3)) == 3
    result = check_polynomial_flux_consistency(3, 2)
    assert result.passed, result.as_line()


@pytest.mark.parametrize("name", sorted(MODEL_FACTORIES))
def test_flux_identity_pointwise(name, rng):
    """Test A({u})∇̂u·n = ∇̂u·ξ({u}) en cada punto de arista a 1e−13 (relativo)."""
    model = build_model(name)
    mesh = build_uniform_mesh(2, side=model.side, origin=model.origin, boundary_kind=model.boundary_kind)
    op = DDGOperator(mesh, model, SchemeConfig.with_defaults("symmetric", 2))
    c = random_projection(mesh, 2, rng, *model.solution_range)
    trace = op.edge_traces(c, 0.0)
    normal = np.broadcast_to(mesh.edge_normals[:, None, :], trace.grad_minus.shape)
    flux_hat = gradient_flux(trace, normal, mesh.edge_h[:, None], op.scheme.beta0, op.scheme.beta1)
    mats = model.diffusion_matrix(trace.average)
    lhs = np.einsum("eqij,eqj,eqi->eq", mats, flux_hat, normal)
    rhs = np.sum(flux_hat * direction_vector(model, trace.average, normal), axis=-1)
    scale = np.maximum(1.0, np.linalg.norm(mats, axis=(-2, -1)) * np.linalg.norm(flux_hat, axis=-1))
    assert np.max(np.abs(lhs - rhs) / scale) < 1e-13


def test_direction_bound_default_samples_every_model():
    result = check_direction_bound()
    assert result.passed, result.as_line()
    assert "10000 muestras por modelo" in result.detail


def test_run_checks_reports_exceptions(monkeypatch):
    def boom():
        raise RuntimeError("sin memoria")

    for name in ("check_quadrature", "check_basis_orthonormality", "check_direction_bound"):
        monkeypatch.setattr(verify, name, boom)
    monkeypatch.setattr(verify, "check_mesh", lambda: CheckResult("malla", True, 0.0, 1e-12))
    for name in (
        "check_limiter",
        "check_constant_residual",
        "check_linear_consistency",
        "check_conservation",
        "check_polynomial_flux_consistency",
        "check_flux_identity",
        "check_symmetric_form",
        "check_brute_force",
    ):
        monkeypatch.setattr(verify, name, lambda k: CheckResult("x", True, 0.0, 1e-12))
    results = run_checks(1)
    assert len(results) == 12
    failed = [r for r in results if not r.passed]
    assert len(failed) == 3
    assert all(math.isnan(r.value) and "sin memoria" in r.detail for r in failed)


@pytest.mark.parametrize("model_name", ["heat", "anisotropic"])
def test_energy_stability_nonsymmetric(model_name):
    model = build_model(model_name, 0.01)
    report = energy_stability_study(model, "nonsymmetric", k=1, n=3, trials=3, steps=2, seed=7)
    assert report.semi_discrete_ok
    assert report.max_semi_discrete_ratio <= 1e-10
    assert len(report.energies) == 3
    assert report.variant == "nonsymmetric"


def test_energy_stability_default_mesh():
    assert inspect.signature(energy_stability_study).parameters["n"].default == 5
