# tests/test_norms.py
"""
Tests para norms.py

Prueba:
- Error nulo para polinomios representables
- Error L₂ de un campo constante contra otra constante
- Órdenes log₂ entre niveles y casos sin orden
"""

import math

import numpy as np
import pytest

from ddg import DGField, project_initial
from norms import ErrorReport, convergence_orders, l2_error, linf_error


def quadratic(x, y, t=0.0):
    return 1.0 + x * y - 0.5 * y**2 + t


def test_polynomial_projection_has_zero_error(periodic_mesh):
    field = project_initial(periodic_mesh, 2, quadratic)
    assert l2_error(field, periodic_mesh, quadratic, 0.0) < 1e-13
    assert linf_error(field, periodic_mesh, quadratic, 0.0) < 1e-12


def test_constant_offset_error(periodic_mesh):
    """u_h = 1, U = 0 en [0, 1]²: ‖·‖_L₂ = 1 y ‖·‖_L∞ = 1."""
    c = np.zeros((periodic_mesh.n_elements, 3))
    c[:, 0] = 1.0 / np.sqrt(2.0)
    field = DGField(c, 1)

    def zero(x, y, t):
        return np.zeros_like(x)

    assert l2_error(field, periodic_mesh, zero, 0.0) == pytest.approx(1.0)
    assert linf_error(field, periodic_mesh, zero, 0.0) == pytest.approx(1.0)


def test_errors_require_exact_solution(periodic_mesh):
    field = project_initial(periodic_mesh, 1, quadratic)
    with pytest.raises(ValueError):
        l2_error(field, periodic_mesh, None, 0.0)
    with pytest.raises(ValueError):
        linf_error(field, periodic_mesh, None, 0.0)


def test_convergence_orders():
    e = 1e-3
    orders = convergence_orders([e, e / 8, e / 64], [4, 8, 16])
    assert orders[0] is None
    assert orders[1] == pytest.approx(3.0)
    assert orders[2] == pytest.approx(3.0)


@pytest.mark.parametrize(
    "errors,levels",
    [
        ([1e-3, 1e-4], [4, 6]),
        ([1e-3, 0.0], [4, 8]),
        ([1e-3, math.nan], [4, 8]),
        ([math.inf, 1e-4], [4, 8]),
    ],
)
def test_orders_undefined(errors, levels):
    assert convergence_orders(errors, levels) == [None, None]


def test_error_report():
    report = ErrorReport()
    report.add(4, 1e-2, 2e-2)
    report.add(8, 2.5e-3, 1e-2, note="ok")
    assert report.levels == [4, 8]
    assert report.l2_orders[1] == pytest.approx(2.0)
    assert report.linf_orders[1] == pytest.approx(1.0)
    assert report.notes == ["", "ok"]
