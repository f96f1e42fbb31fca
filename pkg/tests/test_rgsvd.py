import numpy as np
import numpy.linalg as nla
import pytest

from gravtv.gsvd import filtered_solution, gsvd_pair
from gravtv.rgsvd import rgsvd, sketch_basis
from gravtv.verify import low_rank_operator


def test_basis_orthonormal_and_deterministic(rng):
    G = rng.standard_normal((30, 80))
    b1 = sketch_basis(G, q=12, oversampling=6, seed=99)
    b2 = sketch_basis(G, q=12, oversampling=6, seed=99)
    assert nla.norm(b1.Q.T @ b1.Q - np.eye(12)) < 1e-10
    np.testing.assert_array_equal(b1.Q, b2.Q)
    b3 = sketch_basis(G, q=12, oversampling=6, seed=100)
    assert not np.array_equal(b1.Q, b3.Q)


def test_exact_rank_capture(rng):
    G = low_rank_operator(rng, 40, 100, 7)
    basis = sketch_basis(G, q=7, oversampling=10, seed=1)
    err = nla.norm(G - G @ basis.Q @ basis.Q.T) / nla.norm(G)
    assert err < 1e-8


def test_full_capture_at_q_near_m(rng):
    # q = m - p captures everything once q reaches the operator rank;
    # a dense full-rank operator necessarily loses the m - q trailing
    # directions, so the capture check uses rank(G) = q
    G = low_rank_operator(rng, 20, 50, 15)
    basis = sketch_basis(G, q=15, oversampling=5, seed=2)  # q = m - p
    err = nla.norm(G - G @ basis.Q @ basis.Q.T) / nla.norm(G)
    assert err < 1e-8


def test_sketch_validation(rng):
    G = rng.standard_normal((10, 30))
    with pytest.raises(ValueError):
        sketch_basis(G, q=8, oversampling=5)  # q + p > m
    with pytest.raises(ValueError):
        sketch_basis(G, q=0)


def test_rgsvd_matches_full_gsvd_on_low_rank(rng):
    m, n, rank = 20, 60, 5
    G = low_rank_operator(rng, m, n, rank)
    D = np.eye(n)
    basis = sketch_basis(G, q=rank, oversampling=10, seed=3)
    fr = rgsvd(G, D, basis)
    ff = gsvd_pair(G, D)
    r = rng.standard_normal(m)
    gam = ff.gamma[np.isfinite(ff.gamma) & (ff.gamma > 0)]
    for alpha in np.geomspace(gam.min(), gam.max(), 4):
        h_r = filtered_solution(fr, r, alpha)
        h_f = filtered_solution(ff, r, alpha)
        assert nla.norm(h_r - h_f) / nla.norm(h_f) < 1e-6


def test_projected_factorization_exact(rng):
    # the second-operator factorization is exact on the projected pair
    G = rng.standard_normal((15, 40))
    D = rng.standard_normal((3 * 40, 40))
    basis = sketch_basis(G, q=8, oversampling=4, seed=4)
    f = rgsvd(G, D, basis)
    B2 = D @ basis.Q
    # V diag(mu) X^T = (V diag(mu) Z) Q
    recon = f.reconstruct_second() @ basis.Q
    assert nla.norm(B2 - recon) < 1e-10


def test_rgsvd_factored_z(rng):
    G = rng.standard_normal((15, 40))
    D = np.diag(rng.uniform(0.5, 2.0, 40))
    basis = sketch_basis(G, q=9, oversampling=4, seed=5)
    f = rgsvd(G, D, basis)
    assert f.Z.shape == (9, 40)
    assert f.Z_pinv.shape == (40, 9)
    assert nla.norm(f.Z @ f.Z_pinv - np.eye(9)) < 1e-10
    proj = f.Z_pinv @ f.Z
    assert nla.norm(proj - proj.T) < 1e-10
    assert nla.norm(proj @ proj - proj) < 1e-10
    coeffs = rng.standard_normal(9)
    np.testing.assert_allclose(f.apply_z_pinv(coeffs), f.Z_pinv @ coeffs,
                               rtol=1e-10, atol=1e-14)


def test_b1_can_be_precomputed(rng):
    G = rng.standard_normal((12, 30))
    D = np.eye(30)
    basis = sketch_basis(G, q=6, oversampling=4, seed=6)
    B1 = G @ basis.Q
    f1 = rgsvd(G, D, basis)
    f2 = rgsvd(G, D, basis, b1=B1)
    np.testing.assert_array_equal(f1.lam, f2.lam)
    np.testing.assert_array_equal(f1.U, f2.U)


def test_approximation_improves_with_q(rng):
    # median operator error over seeds is non-increasing in q
    m, n = 30, 90
    G = low_rank_operator(rng, m, n, 20) + 0.01 * rng.standard_normal((m, n))
    qs = [m // 10, m // 6, m // 2]
    medians = []
    for q in qs:
        errs = []
        for seed in range(10):
            basis = sketch_basis(G, q=q, oversampling=5, seed=seed)
            f = rgsvd(G, np.eye(n), basis)
            errs.append(nla.norm(G - f.reconstruct_first()))
        medians.append(np.median(errs))
    assert medians[0] >= medians[1] >= medians[2]
