# tests/test_utils.py
"""
Tests para el módulo utils.py

Prueba la configuración de logging, el formato de números y el cronómetro
"""

import logging
import math
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

# Añadir src al path
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from utils import LOG_FORMAT, elapsed, format_float, setup_logging


def test_setup_logging_by_name():
    """Test nivel por nombre (insensible a mayúsculas)."""
    with patch("utils.logging.basicConfig") as mock_basic:
        setup_logging("debug")
    mock_basic.assert_called_once_with(level=logging.DEBUG, format=LOG_FORMAT, force=True)


def test_setup_logging_numeric_level():
    with patch("utils.logging.basicConfig") as mock_basic:
        setup_logging(logging.WARNING)
    assert mock_basic.call_args.kwargs["level"] == logging.WARNING


def test_setup_logging_invalid_level():
    with pytest.raises(ValueError):
        setup_logging("verbose")


@pytest.mark.parametrize(
    "value,digits,expected",
    [
        (1.234e-4, 2, "1.23E-04"),
        (0.5, 3, "5.000E-01"),
        (None, 2, "-"),
        (math.nan, 2, "-"),
        (math.inf, 2, "-"),
    ],
)
def test_format_float(value, digits, expected):
    assert format_float(value, digits) == expected


def test_elapsed_measures_time():
    """Test el cronómetro usa perf_counter al entrar y salir del bloque."""
    with patch("utils.time.perf_counter", side_effect=[10.0, 12.5]):
        with elapsed() as clock:
            assert clock["seconds"] == 0.0
    assert clock["seconds"] == pytest.approx(2.5)


def test_elapsed_sets_time_on_exception():
    with patch("utils.time.perf_counter", side_effect=[1.0, 4.0]):
        with pytest.raises(RuntimeError):
            with elapsed() as clock:
                raise RuntimeError("fallo")
    assert clock["seconds"] == pytest.approx(3.0)
