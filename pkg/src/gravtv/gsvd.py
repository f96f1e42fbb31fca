"""Generalized SVD of a matrix pair and the filtered Tikhonov solution.

For a pair (A, B) with no common null space the factorization is

    A = U diag(lam) Z,    B = V diag(mu) Z,    lam_i^2 + mu_i^2 = 1,

with column-orthonormal U, V and a full-row-rank Z.  The generalized
singular values gamma_i = lam_i / mu_i are stored in non-decreasing order.

The factorization is computed by the stable two-step route: an economy QR
of the stacked pair [A; B], then the 2-by-1 CS decomposition of the two
orthonormal blocks (an SVD of the top block; the bottom factor follows
from orthogonality).  No cross-product matrices are ever formed.

Mode/column alignment (documented here once, relied on everywhere):

* modes are indexed 0..k-1 by non-decreasing gamma;
* the leading ``k - U.shape[1]`` modes (only present when the pair is
  wider than A is tall) have lam = 0 and no U column; mode i with
  i >= off_u pairs with column ``U[:, i - off_u]``;
* trailing modes with mu = 0 (gamma = inf) have no V column; mode i < n_v
  pairs with ``V[:, i]``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from .errors import IllPosedPairError

RANK_TOL = 1e-12
LAM_TOL = 1e-12


class GsvdFactors:
    """Factors of one generalized SVD; immutable after construction.

    ``Z`` may be held in the factored form Z = XT @ basis.T produced by the
    randomized path, in which case ``Z`` and ``Z_pinv`` are materialized
    lazily and solves go through the factors directly.
    """

    def __init__(self, U, lam, mu, V=None, xt=None, basis=None):
        self.U = U
        self.lam = np.asarray(lam, dtype=float)
        self.mu = np.asarray(mu, dtype=float)
        self.V = V
        self._xt = xt          # (k, k) or (k, n) row factor
        self._basis = basis    # (n, k) column-orthonormal, or None
        self._z = None
        self._z_pinv = None
        self._xt_lu = None

    @property
    def k(self) -> int:
        """Number of modes."""
        return self.lam.size

    @property
    def off_u(self) -> int:
        """Leading modes (all with lam = 0) that carry no U column."""
        return self.k - self.U.shape[1]

    @property
    def n_v(self) -> int:
        return 0 if self.V is None else self.V.shape[1]

    @property
    def gamma(self) -> np.ndarray:
        """Generalized singular values lam/mu, inf where mu = 0."""
        g = np.full(self.k, np.inf)
        np.divide(self.lam, self.mu, out=g, where=self.mu > 0)
        return g

    @property
    def Z(self) -> np.ndarray:
        if self._z is None:
            self._z = self._xt if self._basis is None else self._xt @ self._basis.T
        return self._z

    @property
    def Z_pinv(self) -> np.ndarray:
        """Moore-Penrose inverse of Z."""
        if self._z_pinv is None:
            if self._basis is None:
                self._z_pinv = np.linalg.pinv(self._xt)
            else:
                # exact pseudo-inverse: basis has orthonormal columns
                self._z_pinv = self._basis @ la.inv(self._xt)
        return self._z_pinv

    def apply_z_pinv(self, coeffs: np.ndarray) -> np.ndarray:
        """Z_pinv @ coeffs without materializing Z_pinv."""
        if self._basis is not None:
            if self._xt_lu is None:
                self._xt_lu = la.lu_factor(self._xt)
            return self._basis @ la.lu_solve(self._xt_lu, coeffs)
        return self.Z_pinv @ coeffs

    def reconstruct_first(self) -> np.ndarray:
        """U diag(lam) Z restricted to modes with U columns."""
        off = self.off_u
        return self.U @ (self.lam[off:, None] * self.Z[off:, :])

    def reconstruct_second(self) -> np.ndarray:
        """V diag(mu) Z restricted to modes with V columns."""
        nv = self.n_v
        return self.V @ (self.mu[:nv, None] * self.Z[:nv, :])


def _complete_orthonormal(partial: np.ndarray, extra: int) -> np.ndarray:
    """Append ``extra`` orthonormal columns to a column-orthonormal matrix."""
    p, r = partial.shape
    Qfull, _ = la.qr(partial, mode="full") if r else (np.eye(p), None)
    return np.hstack([partial, Qfull[:, r:r + extra]])


def gsvd_pair(A, B, compute_v: bool = True, basis=None,
              rank_tol: float = RANK_TOL) -> GsvdFactors:
    """Generalized SVD of the pair (A, B).

    Parameters
    ----------
    A : (m, n) array
    B : (p, n) array with the same column count.
    compute_v : skip the V factor (and derive mu from lam) when False;
        the filtered solution and the risk estimator never need V.
    basis : optional (n_full, n) column-orthonormal matrix; when given the
        returned Z is (X^T)(basis^T) in factored form, as used by the
        randomized projection path.

    Raises
    ------
    IllPosedPairError
        when the stacked pair is column-rank-deficient within ``rank_tol``
        (the pair has a common null space).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[1]:
        raise ValueError(f"non-conforming shapes {A.shape} and {B.shape}")
    m, n = A.shape
    p = B.shape[0]
    if m + p < n:
        raise IllPosedPairError(
            f"stacked pair ({m}+{p}) x {n} cannot have full column rank")

    Qc, R = la.qr(np.vstack([A, B]), mode="economic")
    svals = la.svdvals(R)
    if svals[0] == 0 or svals[-1] < rank_tol * svals[0]:
        raise IllPosedPairError(
            "matrix pair has a (numerically) common null space: "
            f"stack condition {svals[0]:.3e}/{svals[-1]:.3e}")
    Q1, Q2 = Qc[:m], Qc[m:]

    if m >= n:
        U0, s, Wt = np.linalg.svd(Q1, full_matrices=False)  # Wt is n x n
    else:
        U0, s, Wt = np.linalg.svd(Q1, full_matrices=True)   # U0 is m x m
    lam = np.zeros(n)
    lam[:s.size] = np.clip(s, 0.0, 1.0)
    # reverse so gamma = lam/mu is non-decreasing
    lam = lam[::-1]
    W = Wt.T[:, ::-1]
    U = U0[:, ::-1]

    if compute_v:
        T = Q2 @ W
        mu = np.linalg.norm(T, axis=0)
        vtol = RANK_TOL * max(1.0, mu.max(initial=0.0))
        live = mu > vtol
        # mu is non-increasing (lam is non-decreasing), so any numerically
        # zero modes form a trailing block
        n_live = int(np.searchsorted(~live, True))
        live[n_live:] = False
        V_live = T[:, :n_live] / mu[:n_live]
        n_dead = min(n - n_live, p - n_live)
        V = _complete_orthonormal(V_live, n_dead) if n_dead > 0 else V_live
        mu = np.where(live, mu, 0.0)
    else:
        V = None
        mu = np.sqrt(np.clip(1.0 - lam * lam, 0.0, None))

    xt = W.T @ R
    return GsvdFactors(U, lam, mu, V=V, xt=xt, basis=basis)


def filter_factors(factors: GsvdFactors, alpha: float) -> np.ndarray:
    """Tikhonov filter gamma^2/(gamma^2 + alpha^2) for every mode.

    Evaluated as lam^2/(lam^2 + alpha^2 mu^2), which stays finite for
    gamma = inf modes (filter 1) and gamma = 0 modes (filter 0).
    """
    lam2 = factors.lam**2
    return lam2 / (lam2 + alpha**2 * factors.mu**2)


def filtered_solution(factors: GsvdFactors, r_tilde, alpha: float,
                      lam_tol: float = LAM_TOL) -> np.ndarray:
    """Regularized solution h(alpha) from the factors.

    h(alpha) = sum_i  gamma_i^2/(gamma_i^2 + alpha^2) *
               (u_i^T r_tilde)/lam_i * Z_pinv[:, i],

    skipping modes whose lam is below ``lam_tol`` * max(lam) (components
    invisible to the first operator, where 1/lam would blow up).
    """
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    r_tilde = np.asarray(r_tilde, dtype=float).ravel()
    if r_tilde.size != factors.U.shape[0]:
        raise ValueError(
            f"residual length {r_tilde.size} != {factors.U.shape[0]}")
    lam, mu = factors.lam, factors.mu
    off = factors.off_u
    proj = factors.U.T @ r_tilde              # aligned with modes off..k-1
    lam_t, mu_t = lam[off:], mu[off:]
    coeff = np.zeros(factors.k)
    live = lam_t > lam_tol * max(lam.max(initial=0.0), np.finfo(float).tiny)
    denom = lam_t**2 + alpha**2 * mu_t**2
    coeff[off:][live] = lam_t[live] * proj[live] / denom[live]
    return factors.apply_z_pinv(coeff)
