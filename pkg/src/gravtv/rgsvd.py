"""Randomized generalized SVD via a row-space sketch of the data operator.

A Gaussian sketch captures the dominant row space of the (weighted) forward
operator once per inversion; both operators are then projected onto that
basis and an economy GSVD of the small pair is computed.  The factors carry
Z = X^T Q^T in factored form so solves never materialize the n-sized
pseudo-inverse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .gsvd import GsvdFactors, gsvd_pair


def _rng(seed) -> np.random.Generator:
    # counter-based bit generator: identical streams across platforms
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class SketchBasis:
    """Column-orthonormal basis Q (n x q) for the row space of the operator."""

    Q: np.ndarray
    rank: int
    oversampling: int
    seed: int
    power: int = 0

    @property
    def q(self) -> int:
        return self.rank


def sketch_basis(G, q: int, oversampling: int = 10, seed: int = 0,
                 power: int = 0) -> SketchBasis:
    """Randomized range finder for the row space of ``G``.

    Forms Y = Omega G with an (q+oversampling) x m standard Gaussian Omega,
    takes the economy QR of Y^T and keeps the first ``q`` columns.  The
    result is deterministic for a given seed.  ``power`` extra passes
    sharpen the basis for slowly decaying spectra (0 matches the plain
    sketch; the gravity kernels decay fast enough that none are needed).
    """
    G = np.asarray(G, dtype=float)
    m, n = G.shape
    ell = q + oversampling
    if q < 1:
        raise ValueError("target rank q must be >= 1")
    if ell > m:
        raise ValueError(
            f"q + oversampling = {ell} exceeds the data count m = {m}")
    if q > n:
        raise ValueError(f"target rank q = {q} exceeds the column count {n}")
    omega = _rng(seed).standard_normal((ell, m))
    Y = omega @ G
    for _ in range(power):
        Y, _ = la.qr(Y.T, mode="economic")
        Y = (G @ Y).T @ G
    Qfull, _ = la.qr(Y.T, mode="economic")
    return SketchBasis(np.ascontiguousarray(Qfull[:, :q]), q, oversampling,
                       seed, power)


def project_pair(G, D, basis: SketchBasis, b1=None):
    """Project both operators onto the sketch basis: B1 = G Q, B2 = D Q."""
    B1 = (G @ basis.Q) if b1 is None else b1
    B2 = D @ basis.Q
    return B1, B2


def rgsvd(G, D, basis: SketchBasis, compute_v: bool = True,
          b1=None) -> GsvdFactors:
    """Approximate GSVD of (G, D) through the sketch basis.

    ``b1`` may carry a precomputed G @ Q, which is constant across the
    reweighting iterations of an inversion while D changes.
    The returned factors satisfy G ~= U diag(lam) Z and D Q Q^T = V diag(mu) Z
    with Z = X^T Q^T of shape (q, n).
    """
    B1, B2 = project_pair(G, D, basis, b1=b1)
    return gsvd_pair(B1, B2, compute_v=compute_v, basis=basis.Q)
