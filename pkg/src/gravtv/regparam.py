"""Regularization-parameter selection by unbiased predictive risk.

The risk statistic for the projected problem, expressed through the
generalized singular values, is

    U(alpha) = sum_i (1/(gamma_i^2 alpha^-2 + 1))^2 (u_i^T r)^2
             + 2 sum_i gamma_i^2/(gamma_i^2 + alpha^2)  -  k,

minimized over a logarithmic grid spanning the positive gamma range.
Evaluating the grid costs O(k * grid_size) once u_i^T r is precomputed; no
re-factorization happens per candidate alpha.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .gsvd import GsvdFactors


class EndpointAlphaWarning(UserWarning):
    """The risk minimum fell on a grid endpoint (possible under/over-regularization)."""


@dataclass(frozen=True)
class UpreCurve:
    alphas: np.ndarray
    values: np.ndarray
    argmin_index: int
    alpha_opt: float

    @property
    def at_endpoint(self) -> bool:
        return self.argmin_index in (0, self.alphas.size - 1)


def _risk_values(factors: GsvdFactors, proj: np.ndarray,
                 alphas: np.ndarray) -> np.ndarray:
    """Vectorized U(alpha) over a grid; ``proj`` is U^T r_tilde."""
    lam2 = factors.lam**2
    mu2 = factors.mu**2
    off = factors.off_u
    a2 = alphas[:, None] ** 2
    # residual filter 1/(gamma^2/alpha^2 + 1) = alpha^2 mu^2/(lam^2 + alpha^2 mu^2)
    denom = lam2[None, :] + a2 * mu2[None, :]
    f = lam2[None, :] / denom
    resid = (1.0 - f[:, off:]) ** 2 @ (proj * proj)
    trace = f.sum(axis=1)
    return resid + 2.0 * trace - factors.k


def upre_value(factors: GsvdFactors, r_tilde, alpha: float) -> float:
    """Predictive-risk statistic at a single alpha."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    proj = factors.U.T @ np.asarray(r_tilde, dtype=float).ravel()
    return float(_risk_values(factors, proj, np.array([alpha]))[0])


def select_alpha(factors: GsvdFactors, r_tilde, grid_size: int = 100,
                 warn_endpoint: bool = True):
    """Minimize the risk statistic on a log grid of ``grid_size`` points.

    The grid spans the smallest and largest positive finite generalized
    singular values.  Ties are broken toward the larger alpha (stronger
    regularization).  Returns (alpha_opt, UpreCurve).
    """
    if grid_size < 1:
        raise ValueError("grid_size must be >= 1")
    gam = factors.gamma
    pos = gam[np.isfinite(gam) & (gam > 0)]
    if pos.size == 0:
        raise ValueError("no positive generalized singular values")
    lo, hi = pos.min(), pos.max()
    alphas = np.geomspace(lo, hi, grid_size) if grid_size > 1 else np.array([lo])
    proj = factors.U.T @ np.asarray(r_tilde, dtype=float).ravel()
    values = _risk_values(factors, proj, alphas)
    # last occurrence of the minimum = largest alpha among ties
    idx = int(values.size - 1 - np.argmin(values[::-1]))
    curve = UpreCurve(alphas, values, idx, float(alphas[idx]))
    if warn_endpoint and grid_size > 1 and curve.at_endpoint:
        warnings.warn(
            f"risk minimum at grid endpoint alpha={curve.alpha_opt:.4g}",
            EndpointAlphaWarning, stacklevel=2)
    return curve.alpha_opt, curve
