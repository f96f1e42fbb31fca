import numpy as np
import pytest

from gravtv.mesh import (Mesh3D, ModelVector, build_survey_grid, cell_bounds,
                         cell_coords, cell_index)


def test_cell_index_examples():
    assert cell_index(Mesh3D(30, 30, 10, 50, 50, 50), 0, 0, 0) == 0
    assert cell_index(Mesh3D(30, 30, 10, 50, 50, 50), 29, 29, 9) == 8999
    assert cell_index(Mesh3D(2, 3, 4, 1, 1, 1), 1, 2, 3) == 23


def test_cell_index_out_of_range():
    mesh = Mesh3D(3, 3, 3, 10, 10, 10)
    for bad in [(-1, 0, 0), (3, 0, 0), (0, 3, 0), (0, 0, 3)]:
        with pytest.raises(IndexError):
            cell_index(mesh, *bad)
    with pytest.raises(IndexError):
        cell_coords(mesh, 27)


def test_index_roundtrip_exhaustive():
    mesh = Mesh3D(2, 3, 4, 5.0, 6.0, 7.0)
    seen = set()
    for k in range(4):
        for j in range(3):
            for i in range(2):
                idx = cell_index(mesh, i, j, k)
                assert cell_coords(mesh, idx) == (i, j, k)
                seen.add(idx)
    assert seen == set(range(mesh.n_cells))


def test_index_contiguous_in_x():
    mesh = Mesh3D(5, 4, 3, 1, 1, 1)
    for j in range(4):
        for k in range(3):
            for i in range(4):
                assert (cell_index(mesh, i + 1, j, k)
                        == cell_index(mesh, i, j, k) + 1)


def test_mesh_validation():
    with pytest.raises(ValueError):
        Mesh3D(0, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        Mesh3D(1, 1, 1, 0.0, 1, 1)


def test_cell_geometry():
    mesh = Mesh3D(4, 3, 2, 10.0, 20.0, 30.0, origin=(100.0, 200.0, 0.0))
    assert cell_bounds(mesh, 0) == (100, 110, 200, 220, 0, 30)
    centers = mesh.cell_centers()
    assert centers.shape == (24, 3)
    np.testing.assert_allclose(centers[0], [105, 210, 15])
    # x fastest
    np.testing.assert_allclose(centers[1], [115, 210, 15])
    depths = mesh.cell_depths()
    assert depths[0] == 15 and depths[-1] == 45


@pytest.mark.parametrize("nx_s, ny_s, spacing, expected", [
    (30, 30, 50.0, 900),
    (100, 60, 100.0, 6000),
    (1, 1, 50.0, 1),
])
def test_survey_grid_counts(nx_s, ny_s, spacing, expected):
    grid = build_survey_grid(nx_s, ny_s, spacing, 0.0)
    assert grid.m == expected


def test_survey_grid_single_station_at_origin():
    grid = build_survey_grid(1, 1, 50.0, 0.0)
    np.testing.assert_array_equal(grid.stations, [[0.0, 0.0, 0.0]])


def test_survey_grid_height_and_order():
    grid = build_survey_grid(3, 2, 10.0, height=5.0)
    # z positive down: 5 m above the surface is z = -5
    assert np.all(grid.stations[:, 2] == -5.0)
    # x fastest
    np.testing.assert_allclose(grid.stations[:3, 0], [0, 10, 20])
    np.testing.assert_allclose(grid.stations[:3, 1], [0, 0, 0])


def test_survey_grid_validation():
    with pytest.raises(ValueError):
        build_survey_grid(0, 1, 50.0)
    with pytest.raises(ValueError):
        build_survey_grid(1, 1, 0.0)


def test_model_vector_length_check():
    mesh = Mesh3D(2, 2, 2, 1, 1, 1)
    ModelVector(np.zeros(8), mesh)
    with pytest.raises(ValueError):
        ModelVector(np.zeros(7), mesh)


def test_model_vector_grid_roundtrip():
    mesh = Mesh3D(3, 4, 2, 1, 1, 1)
    values = np.arange(24.0)
    mv = ModelVector(values, mesh)
    grid = mv.as_grid()
    assert grid[1, 2, 0] == cell_index(mesh, 1, 2, 0)
    np.testing.assert_array_equal(grid.ravel(order="F"), values)
