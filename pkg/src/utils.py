# src/utils.py
"""
Utilidades auxiliares compartidas.

Incluye:
- `setup_logging`: configura el logging de consola una sola vez (desde la CLI).
- `format_float`: formato compacto para tablas y mensajes.
- `elapsed`: cronómetro simple basado en `time.perf_counter`.
"""

from __future__ import annotations

import logging
import math
import time
from contextlib import contextmanager
from typing import Iterator

LOG_FORMAT = "%(levelname)s: %(message)s"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def setup_logging(level: str | int = "INFO") -> None:
    """Configura el logging raíz con un formato corto.

    Args:
        level: Nombre ("DEBUG", "INFO", ...) o valor numérico del nivel.

    Raises:
        ValueError: Si el nombre del nivel no es válido.
    """
    if isinstance(level, str):
        name = level.strip().upper()
        if name not in LOG_LEVELS:
            raise ValueError(f"Nivel de log inválido: {level!r}")
        level = getattr(logging, name)
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def format_float(value: float | None, digits: int = 2) -> str:
    """`1.23E-04`; "-" para None o valores no finitos."""
    if value is None or not math.isfinite(value):
        return "-"
    return f"{value:.{digits}E}"


@contextmanager
def elapsed() -> Iterator[dict[str, float]]:
    """Mide el tiempo de pared de un bloque: `with elapsed() as t: ...; t["seconds"]`."""
    box = {"seconds": 0.0}
    start = time.perf_counter()
    try:
        yield box
    finally:
        box["seconds"] = time.perf_counter() - start
