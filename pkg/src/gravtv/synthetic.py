"""Synthetic truth models and the noise generator used for benchmarks.

Two reference subsurface models are provided: a pair of dipping dikes on a
30x30x10 mesh of 50 m cells, and a six-body configuration on a 100x60x10
mesh of 100 m cells.  Both scale with the mesh so reduced-size variants of
the same scenes can be built for quick runs.  All bodies are defined by
index rules, so a given mesh always produces the same cell lists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Mesh3D, ModelVector, cell_index


@dataclass(frozen=True)
class NoiseModel:
    """Per-datum noise std eta_i = a*|d_i| + b*||d||_2."""

    a: float
    b: float
    seed: int = 0

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ValueError("noise coefficients must be >= 0")

    def stds(self, d_exact) -> np.ndarray:
        d = np.asarray(d_exact, dtype=float).ravel()
        return self.a * np.abs(d) + self.b * np.linalg.norm(d)


def add_noise(d_exact, a: float, b: float, seed: int = 0):
    """Contaminate exact data with seeded Gaussian noise.

    Returns (d_obs, eta) where eta_i = a*|d_exact_i| + b*||d_exact|| and
    d_obs = d_exact + eta * g with g ~ N(0, I).  eta does not depend on the
    seed, so the same stds can whiten any draw.
    """
    d = np.asarray(d_exact, dtype=float).ravel()
    eta = NoiseModel(a, b, seed).stds(d)
    g = np.random.Generator(np.random.Philox(seed)).standard_normal(d.size)
    return d + eta * g, eta


def noisy_prior_model(m_true, a: float = 0.05, b: float = 0.02,
                      seed: int = 0) -> np.ndarray:
    """Prior model built by perturbing the true model with Gaussian noise."""
    m_obs, _ = add_noise(np.asarray(m_true, dtype=float).ravel(), a, b, seed)
    return m_obs


def _frac_range(frac_lo: float, frac_hi: float, count: int) -> range:
    return range(round(frac_lo * count), round(frac_hi * count))


def dike_cells(mesh: Mesh3D):
    """Cell lists (index, density) of the two dipping dikes.

    Each dike occupies a fixed northing band and a thin easting slab that
    advances one cell per layer downward; the two dikes advance in opposite
    directions.  Densities are 1 g/cm^3 throughout.
    """
    nx, ny, nz = mesh.shape
    bodies = []

    # larger dike, dipping toward +x
    y_rng = _frac_range(0.27, 0.70, ny)
    x_base = round(0.23 * nx)
    thick = max(1, round(0.10 * nx))
    k1_max = min(nz - 2, nx - x_base - thick + 1)
    bodies.append(("east-dipping", y_rng, x_base, thick,
                   range(1, k1_max + 1), +1))

    # smaller dike, dipping toward -x; its layer run is capped so the two
    # slabs, which converge by two columns per layer, never overlap
    y_rng2 = _frac_range(0.33, 0.67, ny)
    x_base2 = round(0.667 * nx)
    thick2 = max(1, round(0.067 * nx))
    k2_max = min(round(0.6 * nz), nz - 2, x_base2 + 1,
                 (x_base2 - x_base - thick) // 2 + 1)
    bodies.append(("west-dipping", y_rng2, x_base2, thick2,
                   range(1, k2_max + 1), -1))

    cells = {}
    for name, y_rng, x_base, thick, layers, step in bodies:
        added = 0
        for k in layers:
            x_lo = x_base + step * (k - layers.start)
            for i in range(x_lo, x_lo + thick):
                if not 0 <= i < nx:
                    raise ValueError(
                        f"mesh {mesh.shape} too small to host the {name} dike")
                for j in y_rng:
                    idx = cell_index(mesh, i, j, k)
                    if idx in cells:
                        raise ValueError("dike bodies overlap on this mesh")
                    cells[idx] = 1.0
                    added += 1
        if added == 0:
            raise ValueError(
                f"mesh {mesh.shape} too small to host the {name} dike")
    return sorted(cells.items())


# six boxes: (x_lo, x_hi, y_lo, y_hi) as mesh fractions, layers as
# fractions of depth, density in g/cm^3
_MULTIBODY_BOXES = (
    (0.10, 0.20, 0.17, 0.30, 0.1, 0.5, 1.0),
    (0.30, 0.44, 0.50, 0.63, 0.2, 0.7, 0.8),
    (0.55, 0.65, 0.20, 0.37, 0.1, 0.8, 1.0),
    (0.70, 0.88, 0.67, 0.80, 0.1, 0.6, 0.8),
    (0.15, 0.27, 0.70, 0.83, 0.3, 0.8, 1.0),
    (0.80, 0.92, 0.13, 0.27, 0.2, 0.6, 0.8),
)


def multibody_cells(mesh: Mesh3D):
    """Cell lists (index, density) of the six-body model."""
    nx, ny, nz = mesh.shape
    cells = {}
    for x_lo, x_hi, y_lo, y_hi, k_lo, k_hi, rho in _MULTIBODY_BOXES:
        xs = _frac_range(x_lo, x_hi, nx)
        ys = _frac_range(y_lo, y_hi, ny)
        ks = _frac_range(k_lo, k_hi, nz)
        if not (xs and ys and ks):
            raise ValueError(f"mesh {mesh.shape} too small for the six bodies")
        for k in ks:
            for j in ys:
                for i in xs:
                    idx = cell_index(mesh, i, j, k)
                    if idx in cells:
                        raise ValueError("bodies overlap on this mesh")
                    cells[idx] = rho
    return sorted(cells.items())


def _model_from_cells(mesh: Mesh3D, cells) -> ModelVector:
    values = np.zeros(mesh.n_cells)
    for idx, rho in cells:
        values[idx] = rho
    return ModelVector(values, mesh)


def build_dikes_model(mesh: Mesh3D) -> ModelVector:
    """Two dipping dikes of contrast 1 g/cm^3 embedded in a zero background."""
    return _model_from_cells(mesh, dike_cells(mesh))


def build_multibody_model(mesh: Mesh3D) -> ModelVector:
    """Six boxes of contrast 1.0 or 0.8 g/cm^3 in a zero background."""
    return _model_from_cells(mesh, multibody_cells(mesh))


def dikes_mesh(scale: int = 1) -> Mesh3D:
    """The 30x30x10 mesh of 50 m cells (divide the counts by ``scale``)."""
    return Mesh3D(30 // scale, 30 // scale, 10, 50.0 * scale, 50.0 * scale, 50.0)


def multibody_mesh(nx: int = 100, ny: int = 60, nz: int = 10,
                   cell: float = 100.0) -> Mesh3D:
    """The 100x60x10 mesh of 100 m cells, or a reduced-count variant."""
    return Mesh3D(nx, ny, nz, cell, cell, cell)
