# tests/test_quadrature.py
"""
Tests para quadrature.py

Prueba:
- Pesos positivos que suman 1/2 (volumen) y 1 (arista)
- Exactitud sobre monomios x^a y^b: ∫ = a! b! / (a+b+2)!
- Rango de grados soportados
- Factor ω de la condición CFL
- Conjunto de 361 puntos para L∞
"""

import math

import numpy as np
import pytest

from quadrature import (
    MAX_EXACTNESS,
    assembly_exactness,
    collapsed_gauss_points,
    edge_rule,
    min_volume_weight,
    volume_rule,
)


@pytest.mark.parametrize("exactness", range(0, MAX_EXACTNESS + 1))
def test_weights_positive_and_sum(exactness):
    """Pesos positivos que suman 1/2 en el triángulo y 1 en la arista."""
    rule = volume_rule(exactness)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-14)
    line = edge_rule(exactness)
    assert np.all(line.weights > 0)
    assert line.weights.sum() == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("exactness", [1, 2, 5, 9, 13, 20])
def test_monomials_integrated_exactly(exactness):
    """Todos los monomios de grado ≤ exactitud se integran exactamente."""
    rule = volume_rule(exactness)
    x, y = rule.points[:, 0], rule.points[:, 1]
    for a in range(exactness + 1):
        for b in range(exactness + 1 - a):
            exact = math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)
            approx = np.sum(rule.weights * x**a * y**b)
            assert approx == pytest.approx(exact, rel=1e-11)


def test_constant_and_x_with_lowest_rule():
    """Regla de exactitud 1: ∫1 = 1/2 y ∫x = 1/6."""
    rule = volume_rule(1)
    assert np.sum(rule.weights) == pytest.approx(0.5)
    assert np.sum(rule.weights * rule.points[:, 0]) == pytest.approx(1.0 / 6.0)


def test_points_inside_reference_triangle():
    rule = volume_rule(MAX_EXACTNESS)
    pts = rule.points
    assert np.all(pts >= 0)
    assert np.all(pts.sum(axis=1) <= 1.0)


def test_edge_rule_exactness():
    """Gauss–Legendre en [0, 1]: ∫ s^m = 1/(m+1)."""
    line = edge_rule(7)
    for m in range(8):
        assert np.sum(line.weights * line.points**m) == pytest.approx(1.0 / (m + 1), rel=1e-13)


@pytest.mark.parametrize("bad", [-1, MAX_EXACTNESS + 1, 2.5])
def test_invalid_exactness_raises(bad):
    with pytest.raises(ValueError):
        volume_rule(bad)


def test_min_volume_weight():
    """ω = 1 para la regla de un punto; en (0, 1) para reglas mayores."""
    assert min_volume_weight(volume_rule(1)) == pytest.approx(1.0)
    omega = min_volume_weight(volume_rule(5))
    assert 0.0 < omega < 1.0


def test_min_volume_weight_rejects_edge_rules():
    with pytest.raises(ValueError):
        min_volume_weight(edge_rule(3))


def test_linf_sample_set_has_361_points():
    pts = collapsed_gauss_points(19)
    assert pts.shape == (361, 2)
    assert np.all(pts > 0)
    assert np.all(pts.sum(axis=1) < 1.0)


def test_assembly_exactness():
    assert assembly_exactness(2) == 5
    assert assembly_exactness(2, strongly_nonlinear=True) == 9
    assert assembly_exactness(0) == 1
