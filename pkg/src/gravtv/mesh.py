"""Regular prism mesh, survey geometry and model-vector ordering.

The subsurface is discretized into nx*ny*nz axis-aligned prisms of uniform
size.  The z axis points downward with the surface at z = 0, so cell depths
and station heights share one coordinate (stations at or above the surface
have z <= mesh top).  Cells are numbered x-fastest, z-slowest:

    index(i, j, k) = i + j*nx + k*nx*ny

All derivative operators and file exports rely on this ordering.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Mesh3D:
    """Regular 3-D prism mesh.

    Parameters
    ----------
    nx, ny, nz : int
        Cell counts along x (easting), y (northing) and z (depth).
    dx, dy, dz : float
        Cell sizes in meters.
    origin : tuple of float
        (x0, y0, z0) of the shallowest corner; z0 is the depth of the mesh
        top (0 for a mesh starting at the surface).
    """

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float
    origin: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError("cell counts must be >= 1")
        if min(self.dx, self.dy, self.dz) <= 0:
            raise ValueError("cell sizes must be > 0")

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    def edges(self, axis: str) -> np.ndarray:
        """Cell edge coordinates along ``axis`` ('x', 'y' or 'z')."""
        n, d, o = {
            "x": (self.nx, self.dx, self.origin[0]),
            "y": (self.ny, self.dy, self.origin[1]),
            "z": (self.nz, self.dz, self.origin[2]),
        }[axis]
        return o + d * np.arange(n + 1)

    def centers(self, axis: str) -> np.ndarray:
        """Cell center coordinates along ``axis``."""
        e = self.edges(axis)
        return 0.5 * (e[:-1] + e[1:])

    def cell_depths(self) -> np.ndarray:
        """Depth of every cell center, in model-vector order (length n)."""
        zc = self.centers("z")
        return np.repeat(zc, self.nx * self.ny)

    def cell_centers(self) -> np.ndarray:
        """(n, 3) array of cell center coordinates in model-vector order."""
        xc, yc, zc = self.centers("x"), self.centers("y"), self.centers("z")
        # x fastest, z slowest
        X = np.tile(xc, self.ny * self.nz)
        Y = np.tile(np.repeat(yc, self.nx), self.nz)
        Z = np.repeat(zc, self.nx * self.ny)
        return np.column_stack([X, Y, Z])


def cell_index(mesh: Mesh3D, i: int, j: int, k: int) -> int:
    """Linear index of cell (i, j, k); x fastest, z slowest."""
    if not (0 <= i < mesh.nx and 0 <= j < mesh.ny and 0 <= k < mesh.nz):
        raise IndexError(f"cell ({i}, {j}, {k}) outside mesh {mesh.shape}")
    return i + j * mesh.nx + k * mesh.nx * mesh.ny


def cell_coords(mesh: Mesh3D, index: int) -> tuple[int, int, int]:
    """Inverse of :func:`cell_index`."""
    if not 0 <= index < mesh.n_cells:
        raise IndexError(f"index {index} outside [0, {mesh.n_cells})")
    k, rem = divmod(index, mesh.nx * mesh.ny)
    j, i = divmod(rem, mesh.nx)
    return i, j, k


def cell_bounds(mesh: Mesh3D, index: int):
    """(x1, x2, y1, y2, z1, z2) corner coordinates of one cell."""
    i, j, k = cell_coords(mesh, index)
    x0, y0, z0 = mesh.origin
    return (
        x0 + i * mesh.dx,
        x0 + (i + 1) * mesh.dx,
        y0 + j * mesh.dy,
        y0 + (j + 1) * mesh.dy,
        z0 + k * mesh.dz,
        z0 + (k + 1) * mesh.dz,
    )


@dataclass(frozen=True)
class SurveyGrid:
    """Observation stations; ``stations`` is an (m, 3) array of x, y, z."""

    stations: np.ndarray

    def __post_init__(self):
        st = np.atleast_2d(np.asarray(self.stations, dtype=float))
        if st.ndim != 2 or st.shape[1] != 3 or st.shape[0] < 1:
            raise ValueError("stations must be an (m, 3) array with m >= 1")
        object.__setattr__(self, "stations", st)

    @property
    def m(self) -> int:
        return self.stations.shape[0]


def build_survey_grid(nx_s: int, ny_s: int, spacing: float, height: float = 0.0,
                      origin: tuple[float, float] = (0.0, 0.0)) -> SurveyGrid:
    """Regular nx_s x ny_s station grid at a constant height above the surface.

    Stations sit at x = origin_x + i*spacing (x fastest), z = -height with
    z positive downward, so height 0 places them on the surface.
    """
    if nx_s < 1 or ny_s < 1:
        raise ValueError("station counts must be >= 1")
    if spacing <= 0:
        raise ValueError("spacing must be > 0")
    xs = origin[0] + spacing * np.arange(nx_s)
    ys = origin[1] + spacing * np.arange(ny_s)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    Z = np.full(X.size, -float(height))
    return SurveyGrid(np.column_stack([X.ravel(), Y.ravel(), Z]))


@dataclass
class ModelVector:
    """Length-n vector of cell densities (g/cm^3) tied to a mesh."""

    values: np.ndarray
    mesh: Mesh3D = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size != self.mesh.n_cells:
            raise ValueError(
                f"model length {v.size} != mesh cell count {self.mesh.n_cells}")
        self.values = v

    def as_grid(self) -> np.ndarray:
        """Reshape to (nx, ny, nz); inverse of ravel(order='F')."""
        return self.values.reshape(self.mesh.shape, order="F")
