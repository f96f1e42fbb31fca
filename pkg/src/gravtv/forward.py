"""Dense vertical-gravity sensitivity matrix for a prism mesh.

The kernel is the closed-form vertical attraction of a homogeneous
rectangular prism (8-corner expansion with logarithm and arctangent
terms).  Entries are in mGal per g/cm^3 so a density-contrast model in
g/cm^3 maps directly to anomalies in mGal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError
from .mesh import Mesh3D, ModelVector, SurveyGrid

# 6.674e-11 m^3 kg^-1 s^-2, times 1000 kg/m^3 per g/cm^3, times 1e5 mGal per m/s^2
GRAVITATIONAL_CONSTANT_SI = 6.674e-11
MGAL_PER_GCC = GRAVITATIONAL_CONSTANT_SI * 1000.0 * 1e5


def _corner_potential(X, Y, Z):
    """Antiderivative of the vertical kernel on a grid of corner offsets.

    The log arguments are evaluated as (r^2 - c^2)/(r - c) for negative
    coordinates, which avoids the catastrophic cancellation of c + r when
    the other two offsets are tiny (stations sitting on cell-edge planes).
    """
    X2, Y2, Z2 = X * X, Y * Y, Z * Z
    r = np.sqrt(X2 + Y2 + Z2)
    neg_y, neg_x = Y < 0, X < 0
    arg_y = np.where(neg_y, (X2 + Z2) / np.where(neg_y, r - Y, 1.0), Y + r)
    arg_x = np.where(neg_x, (Y2 + Z2) / np.where(neg_x, r - X, 1.0), X + r)
    return (X * np.log(arg_y) + Y * np.log(arg_x)
            - Z * np.arctan2(X * Y, Z * r))


def _guard_aligned(rel, delta):
    """Shift coordinates that coincide with an edge plane off the singularity."""
    rel = np.asarray(rel, dtype=float).copy()
    rel[np.abs(rel) < delta] = delta
    return rel


def _gz_cells(xe, ye, ze, station):
    """Vertical gravity of every cell of an edge grid, unit density.

    Evaluates the corner antiderivative once per grid corner and takes the
    triple difference, so corners shared between cells are not recomputed.
    Returns an (nx, ny, nz) array in mGal per g/cm^3.
    """
    xs, ys, zs = station
    delta = 1e-12 * max(
        np.max(np.diff(xe)), np.max(np.diff(ye)), np.max(np.diff(ze)))
    X = _guard_aligned(xe - xs, delta)[:, None, None]
    Y = _guard_aligned(ye - ys, delta)[None, :, None]
    Z = _guard_aligned(ze - zs, delta)[None, None, :]
    F = _corner_potential(X, Y, Z)
    cells = np.diff(np.diff(np.diff(F, axis=0), axis=1), axis=2)
    # triple forward difference carries sign (-1)^(#lower corners); flip back
    return -MGAL_PER_GCC * cells


def prism_gz(station, prism, density: float = 1.0) -> float:
    """Vertical gravity (mGal) at ``station`` due to one prism.

    Parameters
    ----------
    station : (x, y, z) observation point, z positive downward.
    prism : (x1, x2, y1, y2, z1, z2) prism bounds with x1 < x2 etc.
    density : density contrast in g/cm^3; the result is linear in it.

    The result is positive for positive density below the station.  The
    station may lie on the prism boundary (a removable singularity handled
    by a tiny coordinate shift) but not strictly inside it.
    """
    x1, x2, y1, y2, z1, z2 = (float(v) for v in prism)
    if not (x1 < x2 and y1 < y2 and z1 < z2):
        raise ValueError("prism must have positive volume")
    xs, ys, zs = (float(v) for v in station)
    if x1 < xs < x2 and y1 < ys < y2 and z1 < zs < z2:
        raise ValueError("station lies strictly inside the prism")
    cells = _gz_cells(np.array([x1, x2]), np.array([y1, y2]),
                      np.array([z1, z2]), (xs, ys, zs))
    return float(density) * float(cells[0, 0, 0])


@dataclass(frozen=True)
class SensitivityMatrix:
    """Dense m x n forward operator in mGal per g/cm^3."""

    values: np.ndarray
    mesh: Mesh3D = field(repr=False)
    grid: SurveyGrid = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.m, self.mesh.n_cells):
            raise ValueError(
                f"sensitivity shape {v.shape} != "
                f"({self.grid.m}, {self.mesh.n_cells})")
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def assemble_sensitivity(mesh: Mesh3D, grid: SurveyGrid,
                         max_memory_gb: float = 8.0) -> SensitivityMatrix:
    """Assemble the dense sensitivity matrix row by row.

    Station rows are independent, so the loop parallelizes trivially if
    ever needed; a vectorized corner-grid evaluation keeps the serial
    version fast.  Raises :class:`ResourceLimitError` when the m*n array
    would exceed ``max_memory_gb``.
    """
    m, n = grid.m, mesh.n_cells
    needed_gb = m * n * 8 / 1024**3
    if needed_gb > max_memory_gb:
        raise ResourceLimitError(
            f"sensitivity matrix needs {needed_gb:.2f} GB "
            f"(limit {max_memory_gb:.2f} GB)")
    xe, ye, ze = mesh.edges("x"), mesh.edges("y"), mesh.edges("z")
    top = mesh.origin[2]
    G = np.empty((m, n))
    for i, station in enumerate(grid.stations):
        if station[2] > top:
            raise ValueError(
                f"station {i} below the mesh top (z={station[2]} > {top})")
        G[i] = _gz_cells(xe, ye, ze, station).ravel(order="F")
    if not np.all(np.isfinite(G)):
        raise FloatingPointError("non-finite entries in sensitivity matrix")
    return SensitivityMatrix(G, mesh, grid)


def predict(G: SensitivityMatrix, model) -> np.ndarray:
    """Forward data G @ m in mGal."""
    values = model.values if isinstance(model, ModelVector) else np.asarray(model, float)
    if values.shape != (G.shape[1],):
        raise ValueError(f"model length {values.shape} != {G.shape[1]}")
    return G.values @ values
