import numpy as np
import pytest

from gravtv.forward import assemble_sensitivity, predict
from gravtv.mesh import Mesh3D, build_survey_grid
from gravtv.synthetic import add_noise, build_dikes_model


@pytest.fixture(scope="session")
def small_problem():
    """10x10x5 dikes scene: mesh, grid, sensitivity, truth and noisy data."""
    mesh = Mesh3D(10, 10, 5, 50.0, 50.0, 50.0)
    grid = build_survey_grid(10, 10, 50.0)
    S = assemble_sensitivity(mesh, grid)
    truth = build_dikes_model(mesh).values
    d_exact = predict(S, truth)
    d_obs, eta = add_noise(d_exact, 0.02, 0.002, seed=7)
    return {"mesh": mesh, "grid": grid, "S": S, "truth": truth,
            "d_exact": d_exact, "d_obs": d_obs, "eta": eta}


@pytest.fixture(scope="session")
def dikes_problem():
    """Full 30x30x10 dikes scene (the Table-1 geometry)."""
    mesh = Mesh3D(30, 30, 10, 50.0, 50.0, 50.0)
    grid = build_survey_grid(30, 30, 50.0)
    S = assemble_sensitivity(mesh, grid)
    truth = build_dikes_model(mesh).values
    d_exact = predict(S, truth)
    d_obs, eta = add_noise(d_exact, 0.02, 0.002, seed=7)
    return {"mesh": mesh, "grid": grid, "S": S, "truth": truth,
            "d_exact": d_exact, "d_obs": d_obs, "eta": eta}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
