"""Weighting and derivative operators for the regularized inversion.

Covers the diagonal depth and data weightings, the discrete gradient
matrices in the three axis directions (square or boundary-trimmed), the
per-cell edge-preserving weights derived from the gradient magnitude, and
the row-weighted stacked operator applied inside each least-squares solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh3D

SQUARE = "square"
TRIMMED = "trimmed"

TV_EXPONENT = -0.25
MGS_EXPONENT = -0.5

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class DepthWeighting:
    """Diagonal depth weighting with entries (z_center + z0)^(-beta/2)."""

    diagonal: np.ndarray
    beta: float
    z0: float

    def apply(self, v):
        return self.diagonal * v

    def apply_inverse(self, v):
        return v / self.diagonal

    @property
    def inverse_diagonal(self) -> np.ndarray:
        return 1.0 / self.diagonal


@dataclass(frozen=True)
class DataWeighting:
    """Diagonal data weighting with entries 1/eta_i."""

    diagonal: np.ndarray

    def apply(self, v):
        return self.diagonal * v


def build_depth_weighting(mesh: Mesh3D, beta: float = 2.0,
                          z0: float | None = None) -> DepthWeighting:
    """Depth weighting that compensates the kernel decay with depth.

    ``z0`` defaults to half the top-layer thickness.  ``beta = 0`` gives the
    identity.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if z0 is None:
        z0 = 0.5 * mesh.dz
    if z0 <= 0:
        raise ValueError("z0 must be > 0")
    diag = (mesh.cell_depths() + z0) ** (-beta / 2.0)
    return DepthWeighting(diag, beta, z0)


def build_data_weighting(eta) -> DataWeighting:
    """Whitening weights 1/eta_i from per-datum noise standard deviations."""
    eta = np.asarray(eta, dtype=float).ravel()
    if np.any(eta <= 0):
        raise ValueError("all noise standard deviations must be > 0")
    return DataWeighting(1.0 / eta)


@dataclass(frozen=True)
class DerivativeOps:
    """Sparse forward-difference operators D_x, D_y, D_z for one mesh.

    ``variant`` is ``"square"`` (n x n, backward differences on the trailing
    boundary) or ``"trimmed"`` (boundary rows dropped, p_axis x n).
    ``row_cells[axis]`` maps each row to the cell where its forward
    difference originates, which is how row weights are looked up.
    """

    mesh: Mesh3D = field(repr=False)
    variant: str
    matrices: dict = field(repr=False)
    row_cells: dict = field(repr=False)
    scaled: bool = True

    def matrix(self, axis: str) -> sp.csr_matrix:
        return self.matrices[axis]

    def rows(self, axis: str) -> np.ndarray:
        return self.row_cells[axis]

    @property
    def n(self) -> int:
        return self.mesh.n_cells

    def p(self, axis: str) -> int:
        return self.matrices[axis].shape[0]

    def stacked(self) -> sp.csr_matrix:
        """D = [D_x; D_y; D_z]."""
        return sp.vstack([self.matrices[a] for a in _AXES], format="csr")


def _axis_geometry(mesh: Mesh3D, axis: str):
    counts = {"x": mesh.nx, "y": mesh.ny, "z": mesh.nz}
    strides = {"x": 1, "y": mesh.nx, "z": mesh.nx * mesh.ny}
    sizes = {"x": mesh.dx, "y": mesh.dy, "z": mesh.dz}
    return counts[axis], strides[axis], sizes[axis]


def _axis_positions(mesh: Mesh3D, axis: str) -> np.ndarray:
    """Per-cell coordinate index along ``axis``, in model-vector order."""
    cells = np.arange(mesh.n_cells)
    if axis == "x":
        return cells % mesh.nx
    if axis == "y":
        return (cells // mesh.nx) % mesh.ny
    return cells // (mesh.nx * mesh.ny)


def _difference_matrix(mesh: Mesh3D, axis: str, variant: str, scaled: bool):
    n = mesh.n_cells
    count, stride, size = _axis_geometry(mesh, axis)
    h = 1.0 / size if scaled else 1.0
    pos = _axis_positions(mesh, axis)
    cells = np.arange(n)
    interior = cells[pos < count - 1]

    if variant == TRIMMED:
        p = interior.size
        rows = np.repeat(np.arange(p), 2)
        cols = np.column_stack([interior, interior + stride]).ravel()
        data = np.tile([-h, h], p)
        return sp.csr_matrix((data, (rows, cols)), shape=(p, n)), interior

    # square: forward differences, backward at the trailing boundary
    rows_list, cols_list, data_list = [], [], []
    rows_list.append(np.repeat(interior, 2))
    cols_list.append(np.column_stack([interior, interior + stride]).ravel())
    data_list.append(np.tile([-h, h], interior.size))
    if count > 1:
        boundary = cells[pos == count - 1]
        rows_list.append(np.repeat(boundary, 2))
        cols_list.append(np.column_stack([boundary - stride, boundary]).ravel())
        data_list.append(np.tile([-h, h], boundary.size))
    rows = np.concatenate(rows_list) if rows_list else np.empty(0, int)
    cols = np.concatenate(cols_list) if cols_list else np.empty(0, int)
    data = np.concatenate(data_list) if data_list else np.empty(0)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n)), cells


def build_derivatives(mesh: Mesh3D, variant: str = SQUARE,
                      scaled: bool = True) -> DerivativeOps:
    """Forward-difference operators for all three directions.

    ``scaled`` divides each stencil by the cell size so products carry
    1/meter units; the unscaled variant uses pure +/-1 entries.
    """
    if variant not in (SQUARE, TRIMMED):
        raise ValueError(f"unknown variant {variant!r}")
    matrices, row_cells = {}, {}
    for axis in _AXES:
        matrices[axis], row_cells[axis] = _difference_matrix(
            mesh, axis, variant, scaled)
    return DerivativeOps(mesh, variant, matrices, row_cells, scaled)


@dataclass(frozen=True)
class TvWeights:
    """Per-cell gradient-magnitude weights.

    values[r] = ((D_x h)_r^2 + (D_y h)_r^2 + (D_z h)_r^2 + eps^2)^exponent
    with exponent -1/4 for the total-variation stabilizer and -1/2 for the
    minimum-gradient-support variant.
    """

    values: np.ndarray
    epsilon: float
    exponent: float


def gradient_components(h, ops: DerivativeOps) -> np.ndarray:
    """(n, 3) per-cell gradient components, zero where a direction has no row."""
    h = np.asarray(h, dtype=float).ravel()
    if h.size != ops.n:
        raise ValueError(f"vector length {h.size} != cell count {ops.n}")
    comps = np.zeros((ops.n, 3))
    for a, axis in enumerate(_AXES):
        vals = ops.matrix(axis) @ h
        comps[ops.rows(axis), a] = vals
    return comps


def tv_weights(h, ops: DerivativeOps, epsilon: float = 1e-4,
               exponent: float = TV_EXPONENT) -> TvWeights:
    """Edge-preserving weights from the gradient magnitude of ``h``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    comps = gradient_components(h, ops)
    mag2 = np.sum(comps * comps, axis=1)
    return TvWeights((mag2 + epsilon**2) ** exponent, epsilon, exponent)


def identity_weights(ops: DerivativeOps, epsilon: float = 1e-4,
                     exponent: float = TV_EXPONENT) -> TvWeights:
    """All-ones weights for the first iteration."""
    return TvWeights(np.ones(ops.n), epsilon, exponent)


def weighted_derivative(weights: TvWeights, ops: DerivativeOps,
                        direction: str = "all") -> sp.csr_matrix:
    """Row-weighted derivative operator W D.

    ``direction`` "all" stacks the three weighted directions; "x"/"y"/"z"
    returns a single direction.  Each row is scaled by the full
    three-direction gradient-magnitude weight of its originating cell.
    """
    w = np.asarray(weights.values, dtype=float).ravel()
    if w.size != ops.n:
        raise ValueError(f"weight length {w.size} != cell count {ops.n}")
    if direction == "all":
        blocks = [ops.matrix(a).multiply(w[ops.rows(a)][:, None])
                  for a in _AXES]
        return sp.vstack(blocks, format="csr")
    if direction not in _AXES:
        raise ValueError(f"unknown direction {direction!r}")
    return ops.matrix(direction).multiply(
        w[ops.rows(direction)][:, None]).tocsr()
