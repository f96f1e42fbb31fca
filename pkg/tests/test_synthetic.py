import json
from pathlib import Path

import numpy as np
import pytest

from gravtv.mesh import Mesh3D, cell_coords
from gravtv.synthetic import (add_noise, build_dikes_model,
                              build_multibody_model, dike_cells,
                              multibody_cells, noisy_prior_model)

FIXTURES = Path(__file__).parent / "fixtures"


def test_dikes_contrast_and_background():
    mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
    model = build_dikes_model(mesh).values
    body = model[model != 0]
    assert np.all(body == 1.0)
    assert body.size > 0
    assert (model == 0).sum() == mesh.n_cells - body.size


def test_dikes_embedded():
    mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
    model = build_dikes_model(mesh).values
    layers = {cell_coords(mesh, int(i))[2] for i in np.nonzero(model)[0]}
    assert max(layers) < mesh.nz - 1  # bodies end above the mesh bottom
    assert min(layers) >= 1           # and below the first layer


def test_dikes_dip_in_opposite_directions():
    mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
    model = build_dikes_model(mesh).values
    xs_per_layer = {}
    for idx in np.nonzero(model)[0]:
        i, j, k = cell_coords(mesh, int(idx))
        xs_per_layer.setdefault(k, []).append(i)
    layers = sorted(xs_per_layer)
    # the left body advances +x, the right body advances -x
    left_edges = [min(xs_per_layer[k]) for k in layers]
    right_edges = [max(xs_per_layer[k]) for k in layers]
    assert all(np.diff(left_edges)[:5] == 1)
    assert all(np.diff(right_edges)[:5] == -1)


def test_dikes_match_frozen_fixture():
    mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
    with open(FIXTURES / "dikes_cells_30x30x10.json") as fh:
        fixture = json.load(fh)
    assert fixture["mesh"] == [30, 30, 10]
    expected = [(int(i), float(rho)) for i, rho in fixture["cells"]]
    assert dike_cells(mesh) == expected


def test_dikes_scale_to_small_mesh():
    mesh = Mesh3D(10, 10, 5, 50.0, 50.0, 50.0)
    model = build_dikes_model(mesh).values
    assert (model != 0).sum() > 0
    assert np.all(np.isin(model, [0.0, 1.0]))


def test_dikes_mesh_too_small():
    with pytest.raises(ValueError):
        build_dikes_model(Mesh3D(2, 2, 3, 50.0, 50.0, 50.0))


def test_multibody_densities():
    mesh = Mesh3D(100, 60, 10, 100.0, 100.0, 100.0)
    model = build_multibody_model(mesh).values
    assert model.size == 60000
    assert set(np.unique(model)) == {0.0, 0.8, 1.0}


def test_multibody_sections_populated():
    mesh = Mesh3D(100, 60, 10, 100.0, 100.0, 100.0)
    model = build_multibody_model(mesh).values
    grid = model.reshape(mesh.shape, order="F")
    for k in range(1, 8):  # depths 100 m through 700 m
        assert np.count_nonzero(grid[:, :, k]) > 0


def test_multibody_scaled_variant():
    mesh = Mesh3D(50, 30, 10, 100.0, 100.0, 100.0)
    cells = multibody_cells(mesh)
    assert len(cells) > 0
    densities = {rho for _, rho in cells}
    assert densities == {0.8, 1.0}


def test_add_noise_model():
    d = np.array([1.0, -2.0, 3.0])
    d_obs, eta = add_noise(d, 0.0, 0.0, seed=5)
    np.testing.assert_array_equal(d_obs, d)
    np.testing.assert_array_equal(eta, 0.0)
    _, eta = add_noise(d, 0.1, 0.01, seed=5)
    norm = np.linalg.norm(d)
    np.testing.assert_allclose(eta, 0.1 * np.abs(d) + 0.01 * norm)


def test_noise_deterministic_and_seed_dependent():
    d = np.linspace(1, 2, 50)
    a1, e1 = add_noise(d, 0.02, 0.002, seed=9)
    a2, e2 = add_noise(d, 0.02, 0.002, seed=9)
    a3, e3 = add_noise(d, 0.02, 0.002, seed=10)
    np.testing.assert_array_equal(a1, a2)
    np.testing.assert_array_equal(e1, e3)  # stds do not depend on the seed
    assert not np.array_equal(a1, a3)


def test_whitened_noise_has_expected_chi_squared():
    # E[ ||(d_obs - d_exact)/eta||^2 ] = m; average over 50 seeds
    rng = np.random.default_rng(0)
    d = rng.uniform(1.0, 3.0, 900)
    chis = []
    for seed in range(50):
        d_obs, eta = add_noise(d, 0.02, 0.002, seed=seed)
        white = (d_obs - d) / eta
        chis.append(white @ white)
    assert np.mean(chis) == pytest.approx(900, rel=0.05)


def test_multibody_coefficients_example():
    # the larger scene uses a smaller norm coefficient
    d = np.linspace(0.5, 4.0, 100)
    _, eta = add_noise(d, 0.02, 0.001, seed=1)
    np.testing.assert_allclose(
        eta, 0.02 * np.abs(d) + 0.001 * np.linalg.norm(d))


def test_noisy_prior_model():
    truth = np.zeros(100)
    truth[40:60] = 1.0
    prior = noisy_prior_model(truth, a=0.05, b=0.02, seed=3)
    assert prior.shape == truth.shape
    assert not np.array_equal(prior, truth)
    again = noisy_prior_model(truth, a=0.05, b=0.02, seed=3)
    np.testing.assert_array_equal(prior, again)
