# src/export.py
"""
Exportación de soluciones DG para visualización externa.

- CSV de muestras (`elemento;x;y;u`) sobre un retículo de referencia
  subdividido en cada elemento.
- VTK (.vtu) con la misma subdivisión en triángulos y el campo "u" como
  dato de punto (requiere el paquete opcional `vtk`).
- Perfiles de línea (`s;x;y;u`), por ejemplo a lo largo de y = 0.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path

import numpy as np

from basis import get_basis
from ddg import DGField
from mesh import Mesh

LOGGER = logging.getLogger(__name__)

# VTK opcional
try:
    import vtk

    VTK_AVAILABLE = True
except ImportError:
    VTK_AVAILABLE = False


class ExportError(RuntimeError):
    """Fallo al escribir un archivo de salida."""


def lattice(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Retículo de referencia con `resolution` subdivisiones por arista.

    Returns:
        (puntos (n, 2), triángulos (m, 3)) en índices locales del retículo.
    """
    if resolution < 1:
        raise ValueError(f"Resolución inválida: {resolution}")
    r = int(resolution)
    index = {}
    points = []
    for j in range(r + 1):
        for i in range(r + 1 - j):
            index[(i, j)] = len(points)
            points.append((i / r, j / r))
    tris = []
    for j in range(r):
        for i in range(r - j):
            tris.append((index[(i, j)], index[(i + 1, j)], index[(i, j + 1)]))
            if i + j + 1 < r:
                tris.append((index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)]))
    return np.array(points), np.array(tris, dtype=int)


def sample_field(field: DGField, mesh: Mesh, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Puntos físicos (nE, n, 2) y valores (nE, n) sobre el retículo de cada elemento."""
    ref, _ = lattice(resolution)
    xy = np.einsum("eij,qj->eqi", mesh.jacobians, ref) + mesh.element_vertices[:, 0][:, None, :]
    return xy, field.evaluate(ref)


def export_field_csv(field: DGField, mesh: Mesh, path: str | Path, resolution: int = 4) -> Path:
    """Escribe las muestras del campo en CSV (delimitador `;`)."""
    out = Path(path)
    xy, values = sample_field(field, mesh, resolution)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="", encoding="utf-8") as fp:
            writer = csv.writer(fp, delimiter=";")
            writer.writerow(["elemento", "x", "y", "u"])
            for e in range(mesh.n_elements):
                for (x, y), u in zip(xy[e], values[e]):
                    writer.writerow([e, f"{x:.12e}", f"{y:.12e}", f"{u:.12e}"])
    except OSError as exc:
        raise ExportError(f"No se pudo escribir {out}: {exc}") from exc
    return out


def export_field_vtk(field: DGField, mesh: Mesh, path: str | Path, resolution: int = 4) -> Path:
    """Escribe un .vtu con la subdivisión del retículo y el campo "u".

    Raises:
        ExportError: Si `vtk` no está instalado o la escritura falla.
    """
    if not VTK_AVAILABLE:
        raise ExportError("El paquete 'vtk' no está instalado. Instálalo con: pip install vtk")
    out = Path(path)
    xy, values = sample_field(field, mesh, resolution)
    _, tris = lattice(resolution)
    n_local = xy.shape[1]

    ugrid = vtk.vtkUnstructuredGrid()
    points = vtk.vtkPoints()
    points.SetDataTypeToDouble()
    data = vtk.vtkDoubleArray()
    data.SetName("u")
    for e in range(mesh.n_elements):
        for (x, y), u in zip(xy[e], values[e]):
            points.InsertNextPoint(float(x), float(y), 0.0)
            data.InsertNextValue(float(u))
    ugrid.SetPoints(points)
    ugrid.GetPointData().AddArray(data)

    for e in range(mesh.n_elements):
        offset = e * n_local
        for tri in tris:
            ids = vtk.vtkIdList()
            for node in tri:
                ids.InsertNextId(int(offset + node))
            ugrid.InsertNextCell(vtk.VTK_TRIANGLE, ids)

    try:
        out.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"No se pudo crear {out.parent}: {exc}") from exc
    writer = vtk.vtkXMLUnstructuredGridWriter()
    writer.SetFileName(str(out))
    writer.SetInputData(ugrid)
    if writer.Write() != 1:
        raise ExportError(f"No se pudo escribir {out}")
    return out


def export_field(
    field: DGField, mesh: Mesh, path: str | Path, resolution: int = 4, fmt: str | None = None
) -> Path:
    """Exporta según el formato ("csv" o "vtk"); por defecto se deduce de la extensión."""
    out = Path(path)
    fmt = (fmt or out.suffix.lstrip(".")).lower()
    if fmt == "csv":
        return export_field_csv(field, mesh, out, resolution)
    if fmt in ("vtk", "vtu"):
        return export_field_vtk(field, mesh, out.with_suffix(".vtu"), resolution)
    raise ValueError(f"Formato de exportación desconocido: {fmt!r}")


def line_profile(
    field: DGField, mesh: Mesh, start: tuple[float, float], end: tuple[float, float], n_samples: int = 201
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Valores de u a lo largo del segmento [start, end].

    Returns:
        (s ∈ [0, 1], puntos (n, 2), valores (n,)).
    """
    if n_samples < 2:
        raise ValueError(f"Se requieren al menos 2 muestras: {n_samples}")
    s = np.linspace(0.0, 1.0, n_samples)
    p0, p1 = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    pts = p0 + s[:, None] * (p1 - p0)
    elements, refs = mesh.locate(pts)
    phi = get_basis(field.degree).values(refs)
    values = np.einsum("pd,pd->p", field.coefficients[elements], phi)
    return s, pts, values


def export_profile(
    field: DGField,
    mesh: Mesh,
    start: tuple[float, float],
    end: tuple[float, float],
    path: str | Path,
    n_samples: int = 201,
) -> Path:
    """Escribe el perfil de línea en CSV (`s;x;y;u`)."""
    out = Path(path)
    s, pts, values = line_profile(field, mesh, start, end, n_samples)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="", encoding="utf-8") as fp:
            writer = csv.writer(fp, delimiter=";")
            writer.writerow(["s", "x", "y", "u"])
            for si, (x, y), u in zip(s, pts, values):
                writer.writerow([f"{si:.6f}", f"{x:.12e}", f"{y:.12e}", f"{u:.12e}"])
    except OSError as exc:
        raise ExportError(f"No se pudo escribir {out}: {exc}") from exc
    return out


def profile_gap(values: np.ndarray, threshold: float = 1e-3) -> bool:
    """True si el perfil tiene algún valor por debajo del umbral (hueco entre soportes)."""
    return bool(np.min(values) < threshold)
