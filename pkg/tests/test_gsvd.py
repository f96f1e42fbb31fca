import numpy as np
import numpy.linalg as nla
import pytest

from gravtv.errors import IllPosedPairError
from gravtv.gsvd import filter_factors, filtered_solution, gsvd_pair
from gravtv.verify import tikhonov_direct


def _random_pair(rng, m, n, p):
    return rng.standard_normal((m, n)), rng.standard_normal((p, n))


def test_identity_pair():
    f = gsvd_pair(np.eye(2), np.eye(2))
    np.testing.assert_allclose(f.gamma, 1.0, rtol=1e-12)
    np.testing.assert_allclose(f.lam, 1 / np.sqrt(2), rtol=1e-12)
    np.testing.assert_allclose(f.mu, 1 / np.sqrt(2), rtol=1e-12)


def test_identity_second_operator_gives_svd(rng):
    A = rng.standard_normal((6, 8))
    f = gsvd_pair(A, np.eye(8))
    sv = np.sort(nla.svd(A, compute_uv=False))
    np.testing.assert_allclose(np.sort(f.gamma[-6:]), sv, rtol=1e-10)
    np.testing.assert_allclose(f.gamma[:2], 0.0, atol=1e-12)


@pytest.mark.parametrize("m, n, p_kind", [(5, 8, "n"), (7, 12, "3n"),
                                          (10, 10, "n"), (12, 8, "3n")])
def test_invariants_random_pairs(rng, m, n, p_kind):
    p = n if p_kind == "n" else 3 * n
    A, B = _random_pair(rng, m, n, p)
    f = gsvd_pair(A, B)
    assert np.abs(f.lam**2 + f.mu**2 - 1).max() < 1e-10
    assert nla.norm(f.U.T @ f.U - np.eye(f.U.shape[1])) < 1e-10
    assert nla.norm(f.V.T @ f.V - np.eye(f.V.shape[1])) < 1e-10
    assert nla.norm(A - f.reconstruct_first()) / nla.norm(A) < 1e-10
    assert nla.norm(B - f.reconstruct_second()) / nla.norm(B) < 1e-10
    assert np.all(np.diff(f.gamma[np.isfinite(f.gamma)]) > -1e-9)
    assert np.all(f.gamma >= 0)
    assert nla.norm(f.Z @ f.Z_pinv - np.eye(f.k)) < 1e-10
    proj = f.Z_pinv @ f.Z
    assert nla.norm(proj - proj.T) < 1e-10
    assert nla.norm(proj @ proj - proj) < 1e-10


def test_reconstruction_diagonal_second(rng):
    A = rng.standard_normal((5, 8))
    B = np.diag(rng.uniform(0.5, 2.0, 8))
    f = gsvd_pair(A, B)
    assert nla.norm(A - f.reconstruct_first()) < 1e-10
    assert nla.norm(B - f.reconstruct_second()) < 1e-10


def test_common_null_space_raises():
    # both operators kill the same vector
    A = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    B = np.array([[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [1.0, 1.0, 0.0]])
    with pytest.raises(IllPosedPairError):
        gsvd_pair(A, B)


def test_too_few_rows_raises():
    with pytest.raises(IllPosedPairError):
        gsvd_pair(np.ones((1, 4)), np.ones((2, 4)))


def test_nonconforming_shapes_raise(rng):
    with pytest.raises(ValueError):
        gsvd_pair(rng.standard_normal((3, 4)), rng.standard_normal((5, 6)))


def test_filtered_solution_matches_normal_equations(rng):
    A, B = _random_pair(rng, 10, 30, 30)
    f = gsvd_pair(A, B)
    r = rng.standard_normal(10)
    gam = f.gamma[np.isfinite(f.gamma) & (f.gamma > 0)]
    alpha = float(np.median(gam))
    h = filtered_solution(f, r, alpha)
    h_ref = tikhonov_direct(A, B, r, alpha)
    assert nla.norm(h - h_ref) / nla.norm(h_ref) < 1e-8


def test_filtered_solution_standard_form_matches_svd(rng):
    # B = I: the filtered solution reduces to standard-form Tikhonov
    A = rng.standard_normal((6, 9))
    f = gsvd_pair(A, np.eye(9))
    r = rng.standard_normal(6)
    alpha = 0.8
    U, s, Vt = nla.svd(A, full_matrices=False)
    h_svd = Vt.T @ (s / (s**2 + alpha**2) * (U.T @ r))
    h = filtered_solution(f, r, alpha)
    assert nla.norm(h - h_svd) / nla.norm(h_svd) < 1e-10


def test_filter_limit_large_alpha(rng):
    A, B = _random_pair(rng, 8, 20, 20)
    f = gsvd_pair(A, B)
    r = rng.standard_normal(8)
    gmax = f.gamma[np.isfinite(f.gamma)].max()
    h_ref = filtered_solution(f, r, gmax)
    h_inf = filtered_solution(f, r, 1e12 * gmax)
    assert nla.norm(h_inf) < 1e-6 * nla.norm(h_ref)


def test_solution_norm_monotone_in_alpha(rng):
    A, B = _random_pair(rng, 8, 20, 60)
    f = gsvd_pair(A, B)
    r = rng.standard_normal(8)
    gam = f.gamma[np.isfinite(f.gamma) & (f.gamma > 0)]
    norms = [nla.norm(filtered_solution(f, r, a))
             for a in np.geomspace(gam.min() / 10, gam.max() * 10, 20)]
    assert np.all(np.diff(norms) <= 1e-12 * norms[0])


def test_filtered_solution_validation(rng):
    A, B = _random_pair(rng, 5, 8, 8)
    f = gsvd_pair(A, B)
    with pytest.raises(ValueError):
        filtered_solution(f, np.zeros(5), 0.0)
    with pytest.raises(ValueError):
        filtered_solution(f, np.zeros(4), 1.0)


def test_filter_factors_bounds(rng):
    A, B = _random_pair(rng, 6, 10, 10)
    f = gsvd_pair(A, B)
    ff = filter_factors(f, 0.5)
    assert np.all(ff >= 0) and np.all(ff <= 1)


def test_compute_v_false_spares_v(rng):
    A, B = _random_pair(rng, 6, 10, 30)
    f = gsvd_pair(A, B, compute_v=False)
    assert f.V is None
    # mu still consistent with lam
    assert np.abs(f.lam**2 + f.mu**2 - 1).max() < 1e-12
    r = rng.standard_normal(6)
    f_full = gsvd_pair(A, B)
    np.testing.assert_allclose(filtered_solution(f, r, 0.7),
                               filtered_solution(f_full, r, 0.7),
                               rtol=1e-9, atol=1e-12)
