"""File formats: station grids, model volumes, sensitivity cache, configs.

All text formats use ``%.17g`` floats so values round-trip bit-exactly
through write/read, which keeps repeated runs byte-identical.  Station
data files are plain delimited text with an ``x y z value`` header; model
volumes are written both as a flat ``i j k x y z density`` table and as a
legacy structured-points volume readable by common visualization tools.
"""

from __future__ import annotations

import configparser
import io
import struct
from pathlib import Path

import numpy as np

from .mesh import Mesh3D, SurveyGrid
from .forward import SensitivityMatrix

_FLOAT = "%.17g"
_SENS_MAGIC = b"GTVSENS1"


def _fmt(value: float) -> str:
    return _FLOAT % value


# ------------------------------------------------------------ data grids

def write_data_grid(path, stations, values) -> None:
    """One row per station: x y z value."""
    stations = np.asarray(stations, float)
    values = np.asarray(values, float).ravel()
    if stations.shape != (values.size, 3):
        raise ValueError("stations and values disagree")
    with open(path, "w") as fh:
        fh.write("x y z value\n")
        for (x, y, z), v in zip(stations, values):
            fh.write(f"{_fmt(x)} {_fmt(y)} {_fmt(z)} {_fmt(v)}\n")


def read_data_grid(path):
    """Returns (stations (m, 3), values (m,))."""
    raw = np.loadtxt(path, skiprows=1, ndmin=2)
    if raw.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns, got {raw.shape[1]}")
    return raw[:, :3], raw[:, 3]


# ---------------------------------------------------------- model volumes

def write_model_volume(path, mesh: Mesh3D, values) -> None:
    """Flat table: i j k x y z density, in model-vector order."""
    values = np.asarray(values, float).ravel()
    if values.size != mesh.n_cells:
        raise ValueError("model length disagrees with mesh")
    centers = mesh.cell_centers()
    with open(path, "w") as fh:
        fh.write("i j k x y z density\n")
        idx = 0
        for k in range(mesh.nz):
            for j in range(mesh.ny):
                for i in range(mesh.nx):
                    x, y, z = centers[idx]
                    fh.write(f"{i} {j} {k} {_fmt(x)} {_fmt(y)} {_fmt(z)} "
                             f"{_fmt(values[idx])}\n")
                    idx += 1


def read_model_volume(path):
    """Returns ((nx, ny, nz), values) from a flat model table."""
    raw = np.loadtxt(path, skiprows=1, ndmin=2)
    if raw.shape[1] != 7:
        raise ValueError(f"{path}: expected 7 columns, got {raw.shape[1]}")
    ijk = raw[:, :3].astype(int)
    shape = tuple(ijk.max(axis=0) + 1)
    n = shape[0] * shape[1] * shape[2]
    if raw.shape[0] != n:
        raise ValueError(f"{path}: {raw.shape[0]} rows for shape {shape}")
    values = np.zeros(n)
    lin = ijk[:, 0] + ijk[:, 1] * shape[0] + ijk[:, 2] * shape[0] * shape[1]
    values[lin] = raw[:, 6]
    return shape, values


def write_vtk_volume(path, mesh: Mesh3D, values, name: str = "density") -> None:
    """Legacy ASCII structured-points volume (cell data)."""
    values = np.asarray(values, float).ravel()
    if values.size != mesh.n_cells:
        raise ValueError("model length disagrees with mesh")
    x0, y0, z0 = mesh.origin
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write("density volume\n")
        fh.write("ASCII\n")
        fh.write("DATASET STRUCTURED_POINTS\n")
        fh.write(f"DIMENSIONS {mesh.nx + 1} {mesh.ny + 1} {mesh.nz + 1}\n")
        fh.write(f"ORIGIN {_fmt(x0)} {_fmt(y0)} {_fmt(z0)}\n")
        fh.write(f"SPACING {_fmt(mesh.dx)} {_fmt(mesh.dy)} {_fmt(mesh.dz)}\n")
        fh.write(f"CELL_DATA {mesh.n_cells}\n")
        fh.write(f"SCALARS {name} double 1\n")
        fh.write("LOOKUP_TABLE default\n")
        for v in values:
            fh.write(_fmt(v) + "\n")


def parse_sections_spec(spec: str):
    """Parse "z=100,y=725" into [(axis, coordinate), ...]."""
    sections = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        axis, _, coord = part.partition("=")
        axis = axis.strip().lower()
        if axis not in ("x", "y", "z") or not coord:
            raise ValueError(f"bad section {part!r}; use axis=coordinate")
        sections.append((axis, float(coord)))
    if not sections:
        raise ValueError("empty sections specification")
    return sections


def write_section(path, mesh: Mesh3D, values, axis: str, coord: float) -> None:
    """One plane (axis = coordinate) of the volume as a delimited grid.

    Rows carry the two in-plane cell-center coordinates and the density of
    the cell layer containing ``coord``.
    """
    values = np.asarray(values, float).ravel()
    grid = values.reshape(mesh.shape, order="F")
    centers = {a: mesh.centers(a) for a in ("x", "y", "z")}
    edges = mesh.edges(axis)
    if not edges[0] <= coord <= edges[-1]:
        raise ValueError(f"{axis}={coord} outside the mesh")
    layer = min(int(np.searchsorted(edges, coord, side="right")) - 1,
                grid.shape["xyz".index(axis)] - 1)
    layer = max(layer, 0)
    keep = [a for a in ("x", "y", "z") if a != axis]
    plane = np.take(grid, layer, axis="xyz".index(axis))
    with open(path, "w") as fh:
        fh.write(f"# section {axis}={_fmt(coord)} (cell layer {layer})\n")
        fh.write(f"{keep[0]} {keep[1]} density\n")
        c0, c1 = centers[keep[0]], centers[keep[1]]
        for i1, v1 in enumerate(c1):
            for i0, v0 in enumerate(c0):
                fh.write(f"{_fmt(v0)} {_fmt(v1)} {_fmt(plane[i0, i1])}\n")


# ------------------------------------------------------ sensitivity cache

def dump_sensitivity(path, S: SensitivityMatrix) -> None:
    """Binary dump: magic, m, n, element size, then row-major float64."""
    m, n = S.shape
    with open(path, "wb") as fh:
        fh.write(_SENS_MAGIC)
        fh.write(struct.pack("<qqq", m, n, 8))
        fh.write(np.ascontiguousarray(S.values, dtype="<f8").tobytes())


def load_sensitivity(path, mesh: Mesh3D, grid: SurveyGrid) -> SensitivityMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(len(_SENS_MAGIC))
        if magic != _SENS_MAGIC:
            raise ValueError(f"{path}: not a sensitivity cache")
        m, n, elem = struct.unpack("<qqq", fh.read(24))
        if elem != 8:
            raise ValueError(f"{path}: unsupported element size {elem}")
        if (m, n) != (grid.m, mesh.n_cells):
            raise ValueError(
                f"{path}: cached shape ({m}, {n}) != "
                f"({grid.m}, {mesh.n_cells})")
        data = np.frombuffer(fh.read(m * n * 8), dtype="<f8").reshape(m, n)
    return SensitivityMatrix(data.copy(), mesh, grid)


# ---------------------------------------------------------------- configs

def config_to_ini(sections: dict) -> str:
    """Render nested {section: {key: value}} tables as INI text."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    for section, table in sections.items():
        parser[section] = {
            key: _fmt(val) if isinstance(val, float) else str(val)
            for key, val in table.items() if val is not None}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def write_config(path, sections: dict) -> None:
    Path(path).write_text(config_to_ini(sections))


def read_config(path) -> dict:
    """Parse an INI config into nested {section: {key: string}} tables."""
    parser = configparser.ConfigParser()
    parser.optionxform = str
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    return {name: dict(parser[name]) for name in parser.sections()}
