# tests/conftest.py
"""
Configuración global de pytest para el proyecto.

Incluye:
- Ajuste de `sys.path` para garantizar que `src/` esté disponible.
- Fixtures reutilizables: mallas pequeñas, modelos, generador aleatorio y
  carpeta temporal de resultados.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# ----------------------------------------------------------------------
# Configuración de rutas
# ----------------------------------------------------------------------
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from mesh import DIRICHLET, PERIODIC, build_uniform_mesh  # noqa: E402
from models import build_model, heat_model  # noqa: E402


# ----------------------------------------------------------------------
# Fixtures
# ----------------------------------------------------------------------
@pytest.fixture
def tmp_results_dir(tmp_path):
    """Crea un directorio temporal `resultados/` para pruebas de salida."""
    d = tmp_path / "resultados"
    d.mkdir()
    return d


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def periodic_mesh():
    """Malla periódica 3×3 sobre [0, 1]² (18 elementos)."""
    return build_uniform_mesh(3, boundary_kind=PERIODIC)


@pytest.fixture
def dirichlet_mesh():
    """Malla Dirichlet 3×3 sobre [0, 1]²."""
    return build_uniform_mesh(3, boundary_kind=DIRICHLET)


@pytest.fixture
def heat():
    return heat_model(0.01)


@pytest.fixture
def anisotropic():
    return build_model("anisotropic", 0.01)


@pytest.fixture
def porous():
    """Medio poroso manufacturado (γ = 3, μ = 0.01)."""
    return build_model("porous_manufactured", 0.01)
