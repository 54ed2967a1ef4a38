"""Cauchy-matrix algebra on interlaced spectra.

The matrix M with entries 1/(lam_i - lam'_j) couples the free and contact
spectra.  Because its nodes interlace, its square submatrices admit explicit
product formulas for the determinant and inverse (O(N^2) arithmetic), and the
squared contact-row amplitudes eta of the free modes follow from the null
relation eta^T M = 0 in closed form.
"""

from __future__ import annotations

import numpy as np

from .errors import InterlacingError, InvalidParameterError

__all__ = ["cauchy_matrix", "cauchy_det", "cauchy_inverse", "eta"]

# Node pairs closer than NEAR_SINGULAR_RTOL * spread make M numerically useless;
# below DENSE_FALLBACK_RTOL the product formulas lose accuracy and a dense
# solve is preferred.
NEAR_SINGULAR_RTOL = 1e-12
DENSE_FALLBACK_RTOL = 1e-6


def _diffs(x, y):
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if x.ndim != 1 or y.ndim != 1:
        raise InvalidParameterError("node sets must be 1-d")
    return x[:, None] - y[None, :]


def _spread(x, y):
    lo = min(x.min(), y.min())
    hi = max(x.max(), y.max())
    return max(hi - lo, 1e-300)


def cauchy_matrix(lam, lam_prime) -> np.ndarray:
    """M[i, j] = 1 / (lam[i] - lam_prime[j]); errors on near-coincident nodes."""
    d = _diffs(lam, lam_prime)
    if np.abs(d).min() < NEAR_SINGULAR_RTOL * _spread(np.asarray(lam), np.asarray(lam_prime)):
        raise InterlacingError("near-singular spectrum: lam and lam_prime nodes nearly coincide")
    return 1.0 / d


def cauchy_det(x, y) -> float:
    """Determinant of the square matrix 1/(x_i - y_j) by the product formula."""
    d = _diffs(x, y)
    n = d.shape[0]
    if d.shape != (n, n):
        raise InvalidParameterError("cauchy_det needs equally sized node sets")
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    num = 1.0
    for i in range(n):
        for j in range(i + 1, n):
            num *= (x[j] - x[i]) * (y[i] - y[j])
    return num / np.prod(d)


def cauchy_inverse(x, y) -> np.ndarray:
    """Inverse of the square Cauchy matrix C[i, j] = 1/(x_i - y_j).

    Uses the Lagrange product formula: with P(z) = prod(z - x_k) and
    Q(z) = prod(z - y_k),

        inv(C)[j, l] = Q(x_l) P(y_j) / ((y_j - x_l) P'(x_l) Q'(y_j)).

    Falls back to a dense inverse when the minimum node gap is below
    DENSE_FALLBACK_RTOL times the node spread.
    """
    d = _diffs(x, y)
    n = d.shape[0]
    if d.shape != (n, n):
        raise InvalidParameterError("cauchy_inverse needs equally sized node sets")
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    spread = _spread(x, y)
    min_gap = np.abs(d).min()
    if n > 1:
        dx = np.abs(x[:, None] - x[None, :]) + np.diag(np.full(n, np.inf))
        dy = np.abs(y[:, None] - y[None, :]) + np.diag(np.full(n, np.inf))
        min_gap = min(min_gap, dx.min(), dy.min())
    if min_gap < NEAR_SINGULAR_RTOL * spread:
        raise InterlacingError("near-coincident nodes: Cauchy inverse is singular")
    if min_gap < DENSE_FALLBACK_RTOL * spread:
        return np.linalg.inv(1.0 / d)
    q_at_x = np.prod(d, axis=1)              # Q(x_l), row products
    p_at_y = np.prod(-d, axis=0)             # P(y_j) = prod_k (y_j - x_k)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    p_deriv = np.prod(dx, axis=1)            # P'(x_l)
    dy = y[:, None] - y[None, :]
    np.fill_diagonal(dy, 1.0)
    q_deriv = np.prod(dy, axis=1)            # Q'(y_j)
    return (p_at_y / q_deriv)[:, None] * (q_at_x / p_deriv)[None, :] / (-d.T)


def eta(lam, lam_prime) -> np.ndarray:
    """Squared contact-row mode amplitudes from the spectra alone.

    eta solves eta^T M = 0 with eta[-1] = 1; equivalently

        eta_i = prod_j (lam_i - lam'_j) / prod_{k != i} (lam_i - lam_k),

    normalized by the i = N value.  All entries are positive for strictly
    interlaced spectra.
    """
    lam = np.asarray(lam, float)
    lamp = np.asarray(lam_prime, float)
    n = lam.shape[0]
    if lamp.shape != (n - 1,):
        raise InvalidParameterError("lam_prime must have one entry fewer than lam")
    d = _diffs(lam, lamp)
    if np.abs(d).min() < NEAR_SINGULAR_RTOL * _spread(lam, lamp):
        raise InterlacingError("near-singular spectrum in eta")
    dl = lam[:, None] - lam[None, :]
    np.fill_diagonal(dl, 1.0)
    out = np.prod(d, axis=1) / np.prod(dl, axis=1)
    out = out / out[-1]
    if not np.all(out > 0):
        raise InterlacingError("eta has non-positive entries; spectra are not interlaced")
    return out
