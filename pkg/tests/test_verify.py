import numpy as np
import numpy.linalg as nla
import pytest

from gravtv.gsvd import gsvd_pair
from gravtv.verify import (CheckResult, check_gsvd_identities,
                           check_kernel_vs_integration, run_all)


def test_quick_suite_passes():
    results = run_all(quick=True)
    assert results, "empty check suite"
    for res in results:
        assert res.passed, str(res)
    # the report carries measured residuals, not only booleans
    assert all(np.isfinite(r.residual) for r in results)
    assert all(r.residual >= 0 for r in results)


def test_check_result_format():
    res = CheckResult("demo", True, 1.2e-12, 1e-10, "3 cases")
    assert "PASS" in str(res)
    assert "1.200e-12" in str(res)
    assert "demo" in str(res)
    assert "FAIL" in str(CheckResult("demo", False, 1.0, 1e-10))


def test_perturbed_factors_fail_reconstruction(rng):
    """Negative control: a corrupted diagonal factor must be caught."""
    A = rng.standard_normal((8, 20))
    B = rng.standard_normal((20, 20))
    f = gsvd_pair(A, B)
    f.lam[-1] += 1e-3  # corrupt one entry of the first diagonal factor
    residual = nla.norm(A - f.reconstruct_first()) / nla.norm(A)
    check = CheckResult("gsvd-reconstruct-first", residual < 1e-10,
                        residual, 1e-10)
    assert not check.passed
    # and the unit-circle identity breaks as well
    assert np.abs(f.lam**2 + f.mu**2 - 1).max() > 1e-10


def test_gsvd_identities_runs_with_few_pairs():
    results = check_gsvd_identities(n_pairs=5, seed=11)
    assert len(results) == 6
    assert all(r.passed for r in results)


def test_kernel_check_with_random_configs():
    res = check_kernel_vs_integration(cases=[], n_random=3, seed=8)
    assert res.passed, str(res)
    assert "3 configurations" in res.detail
