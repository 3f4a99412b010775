# tests/test_ddg.py
"""
Tests para ddg.py

Prueba:
- Variantes, σ y parámetros β por defecto
- Flujo del gradiente y flujos test (forma cerrada vs. traza unilateral)
- Proyección inicial y DGField
- Operador: constantes, conservación, estabilidad de energía (no simétrica),
  estado espejo Dirichlet y detección de valores no finitos
"""

import numpy as np
import pytest

from ddg import (
    DDGOperator,
    DGField,
    EdgeTrace,
    NonFiniteStateError,
    SchemeConfig,
    Variant,
    assemble_residual,
    direction_vector,
    gradient_flux,
    one_sided_test_flux,
    project_initial,
    test_flux as general_test_flux,
)
from mesh import build_uniform_mesh
from models import build_model
from verify import random_projection


def test_variant_sigma_and_parse():
    assert Variant.parse("DDGIC") is Variant.DDGIC
    assert Variant.BASELINE.sigma == 0
    assert Variant.DDGIC.sigma == 1
    assert Variant.SYMMETRIC.sigma == 1
    assert Variant.NONSYMMETRIC.sigma == -1
    with pytest.raises(ValueError):
        Variant.parse("upwind")


def test_scheme_defaults():
    scheme = SchemeConfig.with_defaults("symmetric", 2)
    assert scheme.beta0 == pytest.approx(9.0)
    assert scheme.beta0v == pytest.approx(4.5)
    assert scheme.beta1 == pytest.approx(1.0 / 12.0)
    p0 = SchemeConfig.with_defaults("ddgic", 0)
    assert p0.beta0 == pytest.approx(1.0)
    assert p0.beta1 == 0.0


def test_scheme_validation():
    with pytest.raises(ValueError):
        SchemeConfig.with_defaults("ddgic", 5)
    with pytest.raises(ValueError):
        SchemeConfig.with_defaults("ddgic", 1, beta0=-1.0)


def test_gradient_flux_of_smooth_trace_is_gradient():
    """Sin salto ni salto de hessiana, ∇̂u = ∇u."""
    g = np.array([[0.3, -1.2]])
    hess = np.array([[[1.0, 0.5], [0.5, 2.0]]])
    trace = EdgeTrace(np.array([0.4]), np.array([0.4]), g, g, hess, hess)
    flux = gradient_flux(trace, np.array([1.0, 0.0]), np.array([0.1]), 9.0, 1.0 / 12.0)
    np.testing.assert_allclose(flux, g)


def test_gradient_flux_jump_term():
    """⟦u⟧ = 1, h = 0.5, β₀ = 4 → 8n."""
    zero_g = np.zeros((1, 2))
    zero_h = np.zeros((1, 2, 2))
    trace = EdgeTrace(np.array([0.0]), np.array([1.0]), zero_g, zero_g, zero_h, zero_h)
    normal = np.array([0.6, 0.8])
    flux = gradient_flux(trace, normal, np.array([0.5]), 4.0, 0.25)
    np.testing.assert_allclose(flux[0], 8.0 * normal)


@pytest.mark.parametrize("variant", list(Variant))
def test_one_sided_flux_matches_general_flux(variant, rng):
    scheme = SchemeConfig.with_defaults(variant, 2)
    value = rng.standard_normal(5)
    grad = rng.standard_normal((5, 2))
    hess = rng.standard_normal((5, 2, 2))
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    normal = np.array([0.0, -1.0])
    h = np.full(5, 0.2)
    closed = one_sided_test_flux(variant, value, grad, hess, normal, h, scheme)
    general = general_test_flux(variant, EdgeTrace.one_sided(value, grad, hess), normal, h, scheme)
    np.testing.assert_allclose(closed, general, atol=1e-14)


def test_direction_vector_heat(heat):
    n = np.array([[0.6, 0.8]])
    np.testing.assert_allclose(direction_vector(heat, np.array([0.3]), n), 0.01 * n)


def test_direction_vector_uses_transpose(anisotropic):
    """ξ = Aᵀn: para n = (1, 0) es la primera fila de A."""
    xi = direction_vector(anisotropic, 0.0, np.array([1.0, 0.0]))
    np.testing.assert_allclose(xi, 0.01 * np.array([2.0, 1.0]))


def test_dgfield_shape_validation():
    with pytest.raises(ValueError):
        DGField(np.zeros((4, 5)), 2)


def test_cell_averages():
    field = DGField(np.array([[1.0, 0.3, 0.1]]), 1)
    assert field.cell_averages[0] == pytest.approx(np.sqrt(2.0))


def test_projection_reproduces_polynomials(dirichlet_mesh):
    field = project_initial(dirichlet_mesh, 2, lambda x, y: 1.0 + x - 2.0 * y + x * y)
    pts = np.array([[0.2, 0.2], [0.6, 0.1]])
    values = field.evaluate(pts)
    xy = np.einsum("eij,qj->eqi", dirichlet_mesh.jacobians, pts) + dirichlet_mesh.element_vertices[:, 0][:, None, :]
    expected = 1.0 + xy[..., 0] - 2.0 * xy[..., 1] + xy[..., 0] * xy[..., 1]
    np.testing.assert_allclose(values, expected, atol=1e-13)


def test_projection_requires_exact_rule(periodic_mesh):
    with pytest.raises(ValueError):
        project_initial(periodic_mesh, 3, lambda x, y: x, exactness=4)


def test_operator_rejects_boundary_mismatch(dirichlet_mesh, heat):
    with pytest.raises(ValueError):
        DDGOperator(dirichlet_mesh, heat, SchemeConfig.with_defaults("ddgic", 1))


@pytest.mark.parametrize("k", [0, 1, 2])
@pytest.mark.parametrize("variant", list(Variant))
def test_constant_field_is_stationary(k, variant, periodic_mesh):
    model = build_model("porous", 0.01)
    op = DDGOperator(periodic_mesh, model, SchemeConfig.with_defaults(variant, k))
    c = np.zeros((periodic_mesh.n_elements, op.basis.n_dof))
    c[:, 0] = 0.5
    np.testing.assert_allclose(op.residual(c), 0.0, atol=1e-13)


@pytest.mark.parametrize("variant", list(Variant))
def test_mass_is_conserved(variant, periodic_mesh, anisotropic, rng):
    op = DDGOperator(periodic_mesh, anisotropic, SchemeConfig.with_defaults(variant, 2))
    c = random_projection(periodic_mesh, 2, rng)
    rate = op.residual(c)
    assert abs(op.mass(rate)) < 1e-12


@pytest.mark.parametrize("model_name", ["heat", "anisotropic"])
def test_nonsymmetric_energy_decay(model_name, periodic_mesh, rng):
    """⟨u, L(u)⟩ ≤ 0 para la variante no simétrica con A lineal."""
    model = build_model(model_name, 0.01)
    op = DDGOperator(periodic_mesh, model, SchemeConfig.with_defaults("nonsymmetric", 2))
    for _ in range(5):
        c = random_projection(periodic_mesh, 2, rng)
        assert op.inner(c, op.residual(c)) <= 1e-12 * op.energy(c)


def test_dirichlet_mirror_state():
    """Con g = 0 el estado exterior en la frontera es −u⁻."""
    mesh = build_uniform_mesh(2, side=2.0, origin=(-1.0, -1.0), boundary_kind="dirichlet")
    model = build_model("block")
    op = DDGOperator(mesh, model, SchemeConfig.with_defaults("ddgic", 1))
    c = np.zeros((mesh.n_elements, 3))
    c[:, 0] = 0.7 / np.sqrt(2.0)
    trace = op.edge_traces(c, 0.0)
    boundary = ~mesh.interior_mask
    np.testing.assert_allclose(trace.value_minus[boundary], 0.7)
    np.testing.assert_allclose(trace.value_plus[boundary], -0.7)
    np.testing.assert_allclose(trace.jump[~boundary], 0.0, atol=1e-14)


def test_energy_and_mass_functionals(periodic_mesh, heat):
    op = DDGOperator(periodic_mesh, heat, SchemeConfig.with_defaults("ddgic", 1))
    c = np.zeros((periodic_mesh.n_elements, 3))
    c[:, 0] = 2.0 / np.sqrt(2.0)
    assert op.mass(c) == pytest.approx(2.0)
    assert op.energy(c) == pytest.approx(4.0)


def test_non_finite_state_raises(periodic_mesh, heat):
    op = DDGOperator(periodic_mesh, heat, SchemeConfig.with_defaults("ddgic", 1))
    c = np.zeros((periodic_mesh.n_elements, 3))
    c[0, 1] = np.nan
    with pytest.raises(NonFiniteStateError):
        op.residual(c)


def test_assemble_residual_matches_operator(periodic_mesh, heat, rng):
    scheme = SchemeConfig.with_defaults("symmetric", 2)
    c = random_projection(periodic_mesh, 2, rng)
    field = DGField(c, 2, 0.0)
    op = DDGOperator(periodic_mesh, heat, scheme)
    np.testing.assert_allclose(assemble_residual(field, periodic_mesh, heat, scheme), op.residual(c))
