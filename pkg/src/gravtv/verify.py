"""Self-verification oracles: independent reference computations.

Each check recomputes a quantity by a route that shares no code with the
implementation it validates (dense normal-equations solves, explicit
influence-matrix traces, adaptive volume quadrature) and reports the
measured residual against a fixed threshold.  The checks are used both by
the command-line ``verify`` subcommand and by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.linalg as nla
from scipy import integrate

from .forward import MGAL_PER_GCC, prism_gz
from .gsvd import filtered_solution, gsvd_pair
from .regparam import upre_value
from .rgsvd import rgsvd, sketch_basis


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return (f"{status} {self.name}: residual {self.residual:.3e} "
                f"(tol {self.threshold:.1e}){extra}")


def _result(name, residual, threshold, detail=""):
    return CheckResult(name, residual < threshold, float(residual),
                       threshold, detail)


# ---------------------------------------------------------------- oracles

def volume_integral_gz(station, prism, density: float = 1.0,
                       epsrel: float = 1e-10) -> float:
    """Adaptive quadrature of the vertical point-mass kernel over the prism."""
    xs, ys, zs = (float(v) for v in station)
    x1, x2, y1, y2, z1, z2 = (float(v) for v in prism)

    def kernel(z, y, x):
        return (z - zs) / ((x - xs)**2 + (y - ys)**2 + (z - zs)**2) ** 1.5

    val, _ = integrate.tplquad(kernel, x1, x2, y1, y2, z1, z2,
                               epsabs=1e-13, epsrel=epsrel)
    return MGAL_PER_GCC * density * val


def point_mass_gz(station, prism, density: float = 1.0) -> float:
    """Vertical gravity of the prism collapsed to a point at its centroid."""
    xs, ys, zs = (float(v) for v in station)
    x1, x2, y1, y2, z1, z2 = (float(v) for v in prism)
    cx, cy, cz = 0.5 * (x1 + x2), 0.5 * (y1 + y2), 0.5 * (z1 + z2)
    vol = (x2 - x1) * (y2 - y1) * (z2 - z1)
    R2 = (cx - xs)**2 + (cy - ys)**2 + (cz - zs)**2
    return MGAL_PER_GCC * density * vol * (cz - zs) / R2**1.5


def tikhonov_direct(A, B, r, alpha: float) -> np.ndarray:
    """Dense normal-equations solve (A^T A + alpha^2 B^T B) h = A^T r."""
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    return nla.solve(A.T @ A + alpha**2 * (B.T @ B),
                     A.T @ np.asarray(r, float))


def upre_direct(A, B, r, alpha: float) -> float:
    """Risk statistic from the explicit influence matrix of the pair.

    Uses the rank-k residual (misfit projected onto the column space of A)
    and trace(A (A^T A + alpha^2 B^T B)^-1 A^T), minus the column count.
    """
    A = np.asarray(A, float)
    r = np.asarray(r, float)
    k = A.shape[1]
    M = A.T @ A + alpha**2 * (np.asarray(B, float).T @ np.asarray(B, float))
    h = nla.solve(M, A.T @ r)
    influence = A @ nla.solve(M, A.T)
    Qa, _ = nla.qr(A)
    resid = Qa.T @ (A @ h - r)
    return float(resid @ resid + 2.0 * np.trace(influence) - k)


def random_pair(rng, m, n, p):
    """A generic dense pair with no common null space."""
    return rng.standard_normal((m, n)), rng.standard_normal((p, n))


def low_rank_operator(rng, m, n, rank):
    return rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n))


# ----------------------------------------------------------------- checks

def check_gsvd_identities(n_pairs: int = 50, seed: int = 0,
                          tol: float = 1e-10) -> list[CheckResult]:
    """Orthonormality, lam^2 + mu^2 = 1 and multiply-back reconstruction."""
    rng = np.random.default_rng(seed)
    worst = dict.fromkeys(
        ["gsvd-u-orthonormal", "gsvd-v-orthonormal", "gsvd-unit-circle",
         "gsvd-reconstruct-first", "gsvd-reconstruct-second",
         "gsvd-pinv-identity"], 0.0)
    for _ in range(n_pairs):
        m = int(rng.integers(4, 21))
        n = int(rng.integers(m, 61))
        p = n if rng.random() < 0.5 else 3 * n
        A, B = random_pair(rng, m, n, p)
        f = gsvd_pair(A, B)
        ortho_u = nla.norm(f.U.T @ f.U - np.eye(f.U.shape[1]))
        ortho_v = nla.norm(f.V.T @ f.V - np.eye(f.V.shape[1]))
        circle = np.abs(f.lam**2 + f.mu**2 - 1.0).max()
        rec_a = nla.norm(A - f.reconstruct_first()) / nla.norm(A)
        rec_b = nla.norm(B - f.reconstruct_second()) / nla.norm(B)
        proj = f.Z_pinv @ f.Z
        pinv_res = max(
            nla.norm(f.Z @ f.Z_pinv - np.eye(f.k)),
            nla.norm(proj - proj.T), nla.norm(proj @ proj - proj))
        for key, val in [("gsvd-u-orthonormal", ortho_u),
                         ("gsvd-v-orthonormal", ortho_v),
                         ("gsvd-unit-circle", circle),
                         ("gsvd-reconstruct-first", rec_a),
                         ("gsvd-reconstruct-second", rec_b),
                         ("gsvd-pinv-identity", pinv_res)]:
            worst[key] = max(worst[key], val)
    detail = f"{n_pairs} seeded pairs"
    return [_result(name, res, tol, detail) for name, res in worst.items()]


def check_filter_vs_direct(n_instances: int = 50, n_alphas: int = 5,
                           seed: int = 1, tol: float = 1e-8) -> CheckResult:
    """Filtered GSVD solution against the dense normal-equations solve."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        m = int(rng.integers(4, 21))
        n = int(rng.integers(m, 61))
        p = n if rng.random() < 0.5 else 3 * n
        A, B = random_pair(rng, m, n, p)
        f = gsvd_pair(A, B)
        r = rng.standard_normal(m)
        gam = f.gamma[np.isfinite(f.gamma) & (f.gamma > 0)]
        for alpha in np.geomspace(gam.min(), gam.max(), n_alphas):
            h = filtered_solution(f, r, alpha)
            h_direct = tikhonov_direct(A, B, r, alpha)
            worst = max(worst, nla.norm(h - h_direct) / nla.norm(h_direct))
    return _result("filter-vs-direct", worst, tol,
                   f"{n_instances} instances x {n_alphas} alphas")


def check_rgsvd_vs_gsvd(n_instances: int = 10, seed: int = 2,
                        tol: float = 1e-6) -> CheckResult:
    """Sketched solve against the full GSVD when q captures the full rank.

    The comparison uses a (scaled) identity regularizer: the exact solution
    then stays inside the row space of the data operator, which is what the
    sketch basis reproduces once q reaches the operator rank.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        m, n, rank = 20, 60, int(rng.integers(3, 10))
        G = low_rank_operator(rng, m, n, rank)
        D = float(rng.uniform(0.5, 2.0)) * np.eye(n)
        basis = sketch_basis(G, q=rank, oversampling=8,
                             seed=int(rng.integers(1 << 31)))
        fr = rgsvd(G, D, basis)
        ff = gsvd_pair(G, D)
        r = rng.standard_normal(m)
        gam = ff.gamma[np.isfinite(ff.gamma) & (ff.gamma > 0)]
        alpha = float(np.median(gam))
        h_r = filtered_solution(fr, r, alpha)
        h_f = filtered_solution(ff, r, alpha)
        worst = max(worst, nla.norm(h_r - h_f) / nla.norm(h_f))
    return _result("rgsvd-vs-gsvd", worst, tol, f"{n_instances} instances")


def check_upre_vs_trace(n_instances: int = 50, seed: int = 3,
                        tol: float = 1e-8) -> CheckResult:
    """GSVD form of the risk statistic against the influence-matrix form."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        m = int(rng.integers(8, 21))
        q = int(rng.integers(3, m))
        p = int(rng.integers(q, 3 * q + 1))
        B1, B2 = random_pair(rng, m, q, p)
        f = gsvd_pair(B1, B2)
        r = rng.standard_normal(m)
        gam = f.gamma[np.isfinite(f.gamma) & (f.gamma > 0)]
        for alpha in np.geomspace(gam.min(), gam.max(), 3):
            u_impl = upre_value(f, r, alpha)
            u_ref = upre_direct(B1, B2, r, alpha)
            worst = max(worst, abs(u_impl - u_ref) / max(1.0, abs(u_ref)))
    return _result("upre-vs-trace", worst, tol, f"{n_instances} instances")


KERNEL_CASES = [
    # (station, prism): stations off the prism so the quadrature converges
    ((50.0, 50.0, -50.0), (0, 100, 0, 100, 0, 100)),
    ((30.0, 80.0, -10.0), (0, 100, 0, 100, 50, 200)),
    ((-60.0, 40.0, 0.0), (0, 100, 0, 100, 25, 125)),
    ((210.0, -35.0, -5.0), (0, 100, 0, 150, 10, 120)),
    ((75.0, 75.0, -120.0), (50, 100, 50, 100, 0, 50)),
]


def check_kernel_vs_integration(cases=KERNEL_CASES, seed: int = 4,
                                tol: float = 1e-6,
                                n_random: int = 0) -> CheckResult:
    """Closed-form prism kernel against adaptive volume quadrature."""
    rng = np.random.default_rng(seed)
    cases = list(cases)
    for _ in range(n_random):
        size = rng.uniform(20, 150, 3)
        corner = rng.uniform(-100, 100, 2)
        top = rng.uniform(10, 200)
        prism = (corner[0], corner[0] + size[0],
                 corner[1], corner[1] + size[1], top, top + size[2])
        station = (rng.uniform(-300, 400), rng.uniform(-300, 400),
                   -rng.uniform(0, 100))
        cases.append((station, prism))
    worst = 0.0
    for station, prism in cases:
        a = prism_gz(station, prism, 1.0)
        o = volume_integral_gz(station, prism, 1.0)
        worst = max(worst, abs(a - o) / abs(o))
    return _result("kernel-vs-integration", worst, tol,
                   f"{len(cases)} configurations")


def check_far_field(seed: int = 5, tol: float = 0.01,
                    n_cases: int = 5) -> CheckResult:
    """Kernel against the point-mass value at 100 prism diagonals."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        size = rng.uniform(20, 150, 3)
        prism = (0.0, size[0], 0.0, size[1], 30.0, 30.0 + size[2])
        diag = float(nla.norm(size))
        direction = rng.standard_normal(3)
        direction /= nla.norm(direction)
        center = np.array([0.5 * size[0], 0.5 * size[1], 30.0 + 0.5 * size[2]])
        station = center + 100.0 * diag * direction
        a = prism_gz(station, prism, 1.0)
        pm = point_mass_gz(station, prism, 1.0)
        worst = max(worst, abs(a - pm) / abs(pm))
    return _result("kernel-far-field", worst, tol, f"{n_cases} directions")


def run_all(quick: bool = False) -> list[CheckResult]:
    """Run every oracle check; ``quick`` trims the instance counts."""
    n = 10 if quick else 50
    results = []
    results += check_gsvd_identities(n_pairs=n)
    results.append(check_filter_vs_direct(n_instances=n))
    results.append(check_rgsvd_vs_gsvd(n_instances=3 if quick else 10))
    results.append(check_upre_vs_trace(n_instances=n))
    results.append(check_kernel_vs_integration(
        cases=KERNEL_CASES[:2] if quick else KERNEL_CASES))
    results.append(check_far_field(n_cases=2 if quick else 5))
    return results
