# src/mesh.py
"""
Malla triangular uniforme sobre un cuadrado y tabla de trazas en aristas.

- `build_uniform_mesh`: rejilla n×n de cuadrados, cada uno partido por una
  diagonal de orientación alternada (triángulos rectángulos congruentes),
  con frontera Dirichlet o periódica.
- Cada arista física aparece una sola vez. El dueño ("owner") es el elemento
  de menor índice y la normal apunta hacia fuera del dueño. En modo periódico
  las aristas opuestas de la frontera se identifican en una sola arista cuyo
  vecino está desplazado por `shift`.
- `edge_traces_setup`: coordenadas de referencia de los puntos de cuadratura
  de cada arista, vistas desde el dueño y desde el vecino.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from quadrature import QuadratureRule

LOGGER = logging.getLogger(__name__)

DIRICHLET = "dirichlet"
PERIODIC = "periodic"
BOUNDARY_KINDS = (DIRICHLET, PERIODIC)

# Marca de vecino inexistente (arista de frontera Dirichlet)
BOUNDARY = -1


@dataclass(frozen=True)
class Edge:
    """Arista física compartida (o de frontera).

    Attributes:
        endpoints: Índices globales de los vértices, vistos desde el dueño.
        owner: Elemento dueño (menor índice).
        neighbor: Elemento vecino o BOUNDARY.
        owner_local: Arista local del dueño (0, 1, 2).
        neighbor_local: Arista local del vecino (-1 en frontera).
        normal: Normal unitaria exterior al dueño.
        length: Longitud |e|.
        h_e: Escala de la arista (promedio de h_K, o h_K del dueño en frontera).
        shift: Desplazamiento periódico del vecino respecto del dueño.
    """

    endpoints: tuple[int, int]
    owner: int
    neighbor: int
    owner_local: int
    neighbor_local: int
    normal: np.ndarray
    length: float
    h_e: float
    shift: np.ndarray = field(default_factory=lambda: np.zeros(2))

    @property
    def is_boundary(self) -> bool:
        return self.neighbor == BOUNDARY

    @property
    def is_periodic(self) -> bool:
        return bool(np.any(self.shift != 0.0))


@dataclass
class Mesh:
    """Malla triangular con conectividad de aristas.

    `elements` guarda los vértices de cada triángulo en orden antihorario; la
    arista local i une los vértices locales i e (i+1) % 3.
    """

    vertices: np.ndarray
    elements: np.ndarray
    edges: list[Edge]
    boundary_kind: str
    n_per_side: int
    origin: tuple[float, float]
    side: float

    @property
    def n_elements(self) -> int:
        return int(self.elements.shape[0])

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def h(self) -> float:
        """Lado de los cuadrados de la rejilla."""
        return self.side / self.n_per_side

    @cached_property
    def element_vertices(self) -> np.ndarray:
        """Coordenadas de los vértices por elemento, forma (nE, 3, 2)."""
        return self.vertices[self.elements]

    @cached_property
    def jacobians(self) -> np.ndarray:
        v = self.element_vertices
        return np.stack((v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=-1)

    @cached_property
    def inverse_jacobians(self) -> np.ndarray:
        return np.linalg.inv(self.jacobians)

    @cached_property
    def dets(self) -> np.ndarray:
        return np.linalg.det(self.jacobians)

    @cached_property
    def areas(self) -> np.ndarray:
        return 0.5 * np.abs(self.dets)

    @cached_property
    def h_K(self) -> np.ndarray:
        """Diámetro del círculo inscrito de cada elemento: 4|K| / perímetro."""
        return _inscribed_diameters(self.element_vertices)

    @cached_property
    def element_edges(self) -> np.ndarray:
        """Índice de arista global de cada arista local, forma (nE, 3)."""
        table = np.full((self.n_elements, 3), -1, dtype=int)
        for idx, e in enumerate(self.edges):
            table[e.owner, e.owner_local] = idx
            if not e.is_boundary:
                table[e.neighbor, e.neighbor_local] = idx
        return table

    # Vistas vectorizadas de las aristas
    @cached_property
    def edge_owner(self) -> np.ndarray:
        return np.array([e.owner for e in self.edges], dtype=int)

    @cached_property
    def edge_neighbor(self) -> np.ndarray:
        return np.array([e.neighbor for e in self.edges], dtype=int)

    @cached_property
    def edge_normals(self) -> np.ndarray:
        return np.array([e.normal for e in self.edges])

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        return np.array([e.length for e in self.edges])

    @cached_property
    def edge_h(self) -> np.ndarray:
        return np.array([e.h_e for e in self.edges])

    @cached_property
    def edge_shift(self) -> np.ndarray:
        return np.array([e.shift for e in self.edges]).reshape(-1, 2)

    @cached_property
    def interior_mask(self) -> np.ndarray:
        return self.edge_neighbor != BOUNDARY

    def edge_vertex_coords(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """Extremos físicos (a, b) de la arista, vistos desde el dueño."""
        e = self.edges[index]
        local = self.element_vertices[e.owner]
        return local[e.owner_local], local[(e.owner_local + 1) % 3]

    def locate(self, points: np.ndarray, tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
        """Elemento que contiene cada punto y sus coordenadas de referencia.

        Solo para mallas de rejilla uniforme. Puntos fuera del dominio → ValueError.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        x0, y0 = self.origin
        n, h = self.n_per_side, self.h
        rel = (pts - np.array([x0, y0])) / h
        if np.any(rel < -tol) or np.any(rel > n + tol):
            raise ValueError("Hay puntos fuera del dominio de la malla")
        i = np.clip(np.floor(rel[:, 0]).astype(int), 0, n - 1)
        j = np.clip(np.floor(rel[:, 1]).astype(int), 0, n - 1)
        first = 2 * (j * n + i)

        refs = [self._reference_coords(cand, pts) for cand in (first, first + 1)]
        r0 = refs[0]
        inside = (r0[:, 0] >= -tol) & (r0[:, 1] >= -tol) & (r0.sum(axis=1) <= 1 + tol)
        elements = np.where(inside, first, first + 1)
        return elements, np.where(inside[:, None], refs[0], refs[1])

    def _reference_coords(self, elements: np.ndarray, pts: np.ndarray) -> np.ndarray:
        return np.einsum(
            "pij,pj->pi", self.inverse_jacobians[elements], pts - self.element_vertices[elements, 0]
        )


def _inscribed_diameters(element_vertices: np.ndarray) -> np.ndarray:
    e1 = element_vertices[:, 1] - element_vertices[:, 0]
    e2 = element_vertices[:, 2] - element_vertices[:, 0]
    areas = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    sides = np.linalg.norm(element_vertices[:, [1, 2, 0]] - element_vertices, axis=-1)
    return 4.0 * areas / sides.sum(axis=1)


def _split_square(i: int, j: int, n_vertices_x: int) -> tuple[tuple[int, int, int], ...]:
    v00 = j * n_vertices_x + i
    v10 = v00 + 1
    v01 = v00 + n_vertices_x
    v11 = v01 + 1
    if (i + j) % 2 == 0:
        # diagonal v00–v11
        return (v00, v10, v11), (v00, v11, v01)
    # diagonal v10–v01
    return (v00, v10, v01), (v10, v11, v01)


def build_uniform_mesh(
    n: int,
    side: float = 1.0,
    origin: tuple[float, float] = (0.0, 0.0),
    boundary_kind: str = PERIODIC,
) -> Mesh:
    """Construye la malla uniforme de 2n² triángulos sobre [x0, x0+L]².

    Args:
        n: Número de cuadrados por lado (n ≥ 1).
        side: Longitud L del lado del dominio.
        origin: Esquina inferior izquierda (x0, y0).
        boundary_kind: "periodic" o "dirichlet".

    Returns:
        Mesh con 2n² elementos; 3n² aristas en modo periódico y 3n² + 2n en Dirichlet.

    Raises:
        ValueError: Si n < 1, L ≤ 0 o el tipo de frontera es desconocido.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"Número de subdivisiones inválido: {n!r}")
    if side <= 0.0:
        raise ValueError(f"Longitud de dominio inválida: {side}")
    if boundary_kind not in BOUNDARY_KINDS:
        raise ValueError(f"Tipo de frontera desconocido: {boundary_kind!r}")

    n = int(n)
    h = side / n
    nvx = n + 1
    grid = np.arange(nvx) * h
    xx, yy = np.meshgrid(origin[0] + grid, origin[1] + grid)
    vertices = np.column_stack((xx.ravel(), yy.ravel()))

    elements = []
    for j in range(n):
        for i in range(n):
            elements.extend(_split_square(i, j, nvx))
    elements = np.array(elements, dtype=int)

    # Agrupación de aristas por punto medio en coordenadas de media celda
    periodic = boundary_kind == PERIODIC
    half_index = np.column_stack(
        (np.tile(np.arange(nvx), nvx), np.repeat(np.arange(nvx), nvx))
    )
    groups: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for elem, tri in enumerate(elements):
        for local in range(3):
            a, b = tri[local], tri[(local + 1) % 3]
            key = half_index[a] + half_index[b]
            if periodic:
                key = key % (2 * n)
            groups.setdefault((int(key[0]), int(key[1])), []).append((elem, local))

    h_k = _inscribed_diameters(vertices[elements])

    edges: list[Edge] = []
    for members in sorted(groups.values(), key=lambda m: min(m)):
        members = sorted(members)
        owner, owner_local = members[0]
        tri = elements[owner]
        a, b = tri[owner_local], tri[(owner_local + 1) % 3]
        pa, pb = vertices[a], vertices[b]
        d = pb - pa
        length = float(np.hypot(d[0], d[1]))
        normal = np.array([d[1], -d[0]]) / length

        if len(members) == 1:
            edges.append(
                Edge((int(a), int(b)), owner, BOUNDARY, owner_local, -1, normal, length, float(h_k[owner]))
            )
            continue

        neighbor, neighbor_local = members[1]
        ntri = elements[neighbor]
        mid_owner = 0.5 * (pa + pb)
        mid_neighbor = 0.5 * (vertices[ntri[neighbor_local]] + vertices[ntri[(neighbor_local + 1) % 3]])
        shift = np.round((mid_neighbor - mid_owner) / side) * side
        edges.append(
            Edge(
                (int(a), int(b)),
                owner,
                neighbor,
                owner_local,
                neighbor_local,
                normal,
                length,
                float(0.5 * (h_k[owner] + h_k[neighbor])),
                shift,
            )
        )

    mesh = Mesh(vertices, elements, edges, boundary_kind, n, (float(origin[0]), float(origin[1])), float(side))
    LOGGER.debug(
        "Malla %s n=%d: %d elementos, %d aristas", boundary_kind, n, mesh.n_elements, mesh.n_edges
    )
    return mesh


@dataclass(frozen=True)
class TraceTable:
    """Puntos de cuadratura de arista vistos desde ambos lados.

    Attributes:
        owner_ref: Coordenadas de referencia en el dueño, (nEd, nq, 2).
        neighbor_ref: Coordenadas de referencia en el vecino, (nEd, nq, 2);
            copia de owner_ref en aristas de frontera.
        physical: Puntos físicos (lado del dueño), (nEd, nq, 2).
        weights: Pesos físicos w_q·|e|, (nEd, nq).
    """

    owner_ref: np.ndarray
    neighbor_ref: np.ndarray
    physical: np.ndarray
    weights: np.ndarray


def edge_traces_setup(mesh: Mesh, rule: QuadratureRule) -> TraceTable:
    """Precalcula las coordenadas de referencia de las trazas en cada arista."""
    if rule.kind != "edge":
        raise ValueError("Se requiere una regla de arista")
    s = rule.points
    starts = np.empty((mesh.n_edges, 2))
    ends = np.empty((mesh.n_edges, 2))
    for idx in range(mesh.n_edges):
        starts[idx], ends[idx] = mesh.edge_vertex_coords(idx)

    physical = starts[:, None, :] + s[None, :, None] * (ends - starts)[:, None, :]
    owner = mesh.edge_owner
    owner_ref = np.einsum(
        "eij,eqj->eqi",
        mesh.inverse_jacobians[owner],
        physical - mesh.element_vertices[owner, 0][:, None, :],
    )

    neighbor_ref = owner_ref.copy()
    interior = mesh.interior_mask
    if np.any(interior):
        nb = mesh.edge_neighbor[interior]
        shifted = physical[interior] + mesh.edge_shift[interior][:, None, :]
        neighbor_ref[interior] = np.einsum(
            "eij,eqj->eqi",
            mesh.inverse_jacobians[nb],
            shifted - mesh.element_vertices[nb, 0][:, None, :],
        )

    weights = rule.weights[None, :] * mesh.edge_lengths[:, None]
    return TraceTable(owner_ref, neighbor_ref, physical, weights)


def export_mesh_csv(mesh: Mesh, directory: str | Path) -> tuple[Path, Path]:
    """Escribe `vertices.csv` y `elements.csv` en el directorio indicado."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    vpath, epath = out / "vertices.csv", out / "elements.csv"
    with open(vpath, "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, delimiter=";")
        writer.writerow(["vertice", "x", "y"])
        for idx, (x, y) in enumerate(mesh.vertices):
            writer.writerow([idx, f"{x:.16g}", f"{y:.16g}"])
    with open(epath, "w", newline="", encoding="utf-8") as fp:
        writer = csv.writer(fp, delimiter=";")
        writer.writerow(["elemento", "v0", "v1", "v2", "h_K"])
        for idx, tri in enumerate(mesh.elements):
            writer.writerow([idx, *map(int, tri), f"{mesh.h_K[idx]:.16g}"])
    return vpath, epath
