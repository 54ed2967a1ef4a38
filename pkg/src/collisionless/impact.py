"""Impact-time equations and their numerical machinery.

The search for an energy-conserving contact trajectory reduces to two scalar
equations in the impact times (tau, tau').  This module provides:

* the per-mode time kernels and the frequency-scaled tangent ``phase_rate``,
* the continuous contact matrix whose two maximal-minor determinants vanish
  exactly at solutions,
* a marching-squares contour scan of the two determinant zero sets in impact
  phase coordinates (o_N, o'_{N-1}) and seed extraction at curve crossings,
* damped-Newton refinement of seeds,
* assembly of the full (2N+1) x 2N matching matrix with its rank test, and
* the linear solve for the mode weights.

Everything except the weight solve and the matching matrix depends on the
model only through its spectra and symmetry signatures.
"""

from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .cauchy import cauchy_matrix, eta as cauchy_eta
from .errors import (
    ConvergenceError,
    DegenerateSolutionError,
    InvalidParameterError,
    PoleError,
    ZeroModeError,
)
from .model import SpectrumPair
from .spectral import SpectralData
from .svgout import SvgCanvas

__all__ = [
    "mode_motion",
    "mode_motion_vec",
    "phase_rate",
    "kernel_ratio",
    "contact_matrix",
    "impact_residual",
    "phi",
    "GridSpec",
    "ContourField",
    "scan_contour",
    "ImpactTimes",
    "refine_root",
    "assemble_impact_matrix",
    "reduction_gap",
    "alt_impact_residual",
    "solve_weights",
    "ImpactSolution",
    "build_solution",
]

ZERO_EIGENVALUE_ATOL = 1e-14
POLE_ATOL = 1e-9


# --------------------------------------------------------------------------- kernels

def mode_motion(t: float, lam: float, s: int):
    """Position and velocity factors of a unit normal mode at time t.

    ``s = 1`` selects the even kernel (cos for lam > 0, cosh for lam < 0) and
    ``s = 0`` the odd one (sin / sinh).  The returned pair (g, gdot) satisfies
    gddot = -lam * g identically.  lam = 0 is rejected: a free mode with zero
    frequency has no periodic kernel.
    """
    if s not in (0, 1):
        raise InvalidParameterError(f"s must be 0 or 1, got {s!r}")
    if abs(lam) <= ZERO_EIGENVALUE_ATOL:
        raise ZeroModeError("mode_motion is undefined for a zero eigenvalue")
    om = np.sqrt(abs(lam))
    if lam > 0:
        if s == 1:
            return np.cos(om * t), -om * np.sin(om * t)
        return np.sin(om * t), om * np.cos(om * t)
    if s == 1:
        return np.cosh(om * t), om * np.sinh(om * t)
    return np.sinh(om * t), om * np.cosh(om * t)


def mode_motion_vec(t, lam, sigma):
    """Vectorized kernels for a spectrum: t broadcast against lam/sigma.

    sigma uses the signature convention sigma = 1 - 2 s (so sigma = -1 is the
    even kernel).  Returns arrays of shape broadcast(t, lam).
    """
    lam = np.asarray(lam, float)
    sigma = np.asarray(sigma)
    t = np.asarray(t, float)
    if t.ndim:
        t = t[..., None]
    om = np.sqrt(np.abs(lam))
    arg = om * t
    even = sigma == -1
    pos = lam > 0
    g = np.where(
        pos,
        np.where(even, np.cos(arg), np.sin(arg)),
        np.where(even, np.cosh(arg), np.sinh(arg)),
    )
    gd = np.where(
        pos,
        np.where(even, -om * np.sin(arg), om * np.cos(arg)),
        np.where(even, om * np.sinh(arg), om * np.cosh(arg)),
    )
    return g, gd


def phase_rate(tau, lam, sigma, zero_mode: str = "raise"):
    """Frequency-scaled kernel tangent w(tau) = lam * g(tau) / gdot(tau).

    Evaluates sigma * tan(om tau)^sigma * om for lam > 0 and
    -tanh(nu tau)^sigma * nu for lam < 0.  With ``zero_mode="limit"`` the
    lam -> 0 limits are returned instead of raising: -1/tau for sigma = -1
    (the even kernel) and 0 for sigma = +1.

    Raises PoleError when an oscillatory mode sits within POLE_ATOL (in phase
    units) of a tan/cot pole.
    """
    lam = np.atleast_1d(np.asarray(lam, float))
    sigma = np.broadcast_to(np.asarray(sigma), lam.shape)
    out = np.empty(lam.shape)
    scale = np.abs(lam).max() if lam.size else 1.0
    for i, (lv, sv) in enumerate(zip(lam, sigma)):
        if abs(lv) <= ZERO_EIGENVALUE_ATOL * max(scale, 1.0):
            if zero_mode != "limit":
                raise ZeroModeError("phase_rate is undefined for a zero eigenvalue")
            out[i] = -1.0 / tau if sv == -1 else 0.0
            continue
        om = np.sqrt(abs(lv))
        o = om * tau
        if lv > 0:
            # poles: sin(o)=0 for sigma=-1 (cot), cos(o)=0 for sigma=+1 (tan)
            shift = 0.0 if sv == -1 else np.pi / 2
            dist = abs((o - shift + np.pi / 2) % np.pi - np.pi / 2)
            if dist < POLE_ATOL:
                raise PoleError(
                    f"phase_rate pole: o = {o:.6g} is within {dist:.2e} of a pole",
                    distance=dist,
                )
            out[i] = np.tan(o) * om if sv == 1 else -om / np.tan(o)
        else:
            th = np.tanh(o)
            out[i] = -th * om if sv == 1 else -om / th
    return out


def _require_nonzero_spectra(spectra: SpectrumPair):
    scale = max(np.abs(spectra.lam).max(), np.abs(spectra.lam_prime).max())
    if np.abs(spectra.lam).min() <= ZERO_EIGENVALUE_ATOL * scale:
        raise ZeroModeError(
            "the generic solver requires non-zero free eigenvalues "
            "(zero-frequency families are handled by the closed forms)"
        )


def kernel_ratio(tau: float, tau_prime: float, spectra: SpectrumPair) -> np.ndarray:
    """Cross-phase kernel ratio matrix G[i, j] = -(w_i/lam_i) / (w'_j/lam'_j)."""
    w = phase_rate(tau, spectra.lam, spectra.sigma)
    wp = phase_rate(tau_prime, spectra.lam_prime, spectra.sigma_prime)
    return -np.outer(w / spectra.lam, spectra.lam_prime / wp)


def _u_matrix(tau, tau_prime, spectra, M):
    """U = M - G * M, the kernel-weighted Cauchy matrix (poles of G permitted nowhere)."""
    return M * (1.0 - kernel_ratio(tau, tau_prime, spectra))


# --------------------------------------------------------------- contact matrix

def contact_matrix(tau, tau_prime, spectra: SpectrumPair, M, eta_vec) -> np.ndarray:
    """Continuous (N+1) x N matrix whose two maximal minors vanish at solutions.

    Top block: (gdot g'^T - g g'dot^T) * M with last column gdot/lam; bottom
    row: sum(eta) * [g', 1].  The contact-phase kernels are evaluated at
    -tau_prime (the contact symmetry point lies after the impact).  Entries
    are entire functions of the times, so zero contours can be traced without
    pole gaps.
    """
    n = spectra.n
    _require_nonzero_spectra(spectra)
    g, gd = mode_motion_vec(tau, spectra.lam, spectra.sigma)
    gp, gpd = mode_motion_vec(-tau_prime, spectra.lam_prime, spectra.sigma_prime)
    eta_sum = float(np.sum(eta_vec))
    out = np.zeros((n + 1, n))
    out[:n, : n - 1] = (np.outer(gd, gp) - np.outer(g, gpd)) * M
    out[:n, n - 1] = gd / spectra.lam
    out[n, : n - 1] = eta_sum * gp
    out[n, n - 1] = eta_sum
    return out


def _normalized_minor_dets(bc: np.ndarray) -> np.ndarray:
    """Determinants of the two maximal minors, each row-normalized to O(1)."""
    n = bc.shape[1]
    out = np.empty(2)
    for k, drop in enumerate((n - 1, n)):
        sub = np.delete(bc, drop, axis=0)
        norms = np.maximum(np.linalg.norm(sub, axis=1), 1e-300)
        out[k] = np.linalg.det(sub / norms[:, None])
    return out


def impact_residual(o, spectra: SpectrumPair, M, eta_vec) -> np.ndarray:
    """Two normalized determinants at impact phases o = (o_N, o'_{N-1}).

    The first drops the top-mode row, the second drops the amplitude-sum row;
    both vanish simultaneously exactly at impact-time solutions.
    """
    tau, tau_prime = spectra.from_phase(o[0], o[1])
    return _normalized_minor_dets(contact_matrix(tau, tau_prime, spectra, M, eta_vec))


def phi(o_n, o_prime, spectra: SpectrumPair, M, eta_vec) -> float:
    """Product of the two normalized determinants; its zero set is both curves."""
    d = impact_residual((o_n, o_prime), spectra, M, eta_vec)
    return float(d[0] * d[1])


def _det_grids(spectra, M, eta_vec, o_n_axis, o_p_axis):
    """Batched evaluation of both determinants over a phase grid."""
    n = spectra.n
    _require_nonzero_spectra(spectra)
    taus = o_n_axis / spectra.omega_top
    taups = o_p_axis / spectra.omega_prime_top
    g, gd = mode_motion_vec(taus, spectra.lam, spectra.sigma)            # (A, n)
    gp, gpd = mode_motion_vec(-taups, spectra.lam_prime, spectra.sigma_prime)  # (B, n-1)
    eta_sum = float(np.sum(eta_vec))
    A, B = taus.size, taups.size
    bc = np.zeros((A, B, n + 1, n))
    bc[:, :, :n, : n - 1] = (
        gd[:, None, :, None] * gp[None, :, None, :]
        - g[:, None, :, None] * gpd[None, :, None, :]
    ) * M[None, None, :, :]
    bc[:, :, :n, n - 1] = (gd / spectra.lam[None, :])[:, None, :]
    bc[:, :, n, : n - 1] = eta_sum * gp[None, :, :]
    bc[:, :, n, n - 1] = eta_sum
    dets = []
    for drop in (n - 1, n):
        sub = np.delete(bc, drop, axis=2)
        norms = np.maximum(np.linalg.norm(sub, axis=3, keepdims=True), 1e-300)
        dets.append(np.linalg.det(sub / norms))
    return dets[0], dets[1]


# ----------------------------------------------------------------- contour scan

@dataclass(frozen=True)
class GridSpec:
    """Rectangular scan window in impact-phase coordinates."""

    o_n_max: float = 4 * np.pi
    o_p_max: float = 2 * np.pi
    step: float = 0.05
    o_n_min: float = 0.0
    o_p_min: float = 0.0

    def axes(self):
        start_n = self.o_n_min if self.o_n_min > 0 else self.step
        start_p = self.o_p_min if self.o_p_min > 0 else self.step
        o_n = np.arange(start_n, self.o_n_max + 0.5 * self.step, self.step)
        o_p = np.arange(start_p, self.o_p_max + 0.5 * self.step, self.step)
        if o_n.size < 2 or o_p.size < 2:
            raise InvalidParameterError("contour grid must contain at least 2x2 points")
        return o_n, o_p


def _cell_crossings(xa, ya, Z):
    """Zero-crossing segments of Z by cell-edge linear interpolation."""
    segments = []
    sgn = np.sign(Z)
    change = (
        (sgn[:-1, :-1] != sgn[1:, :-1])
        | (sgn[:-1, :-1] != sgn[:-1, 1:])
        | (sgn[1:, 1:] != sgn[1:, :-1])
        | (sgn[1:, 1:] != sgn[:-1, 1:])
    )
    for i, j in zip(*np.nonzero(change)):
        x0, x1 = xa[i], xa[i + 1]
        y0, y1 = ya[j], ya[j + 1]
        v00, v10 = Z[i, j], Z[i + 1, j]
        v01, v11 = Z[i, j + 1], Z[i + 1, j + 1]
        pts = []
        if v00 * v10 < 0:
            pts.append((x0 + (x1 - x0) * v00 / (v00 - v10), y0))
        if v01 * v11 < 0:
            pts.append((x0 + (x1 - x0) * v01 / (v01 - v11), y1))
        if v00 * v01 < 0:
            pts.append((x0, y0 + (y1 - y0) * v00 / (v00 - v01)))
        if v10 * v11 < 0:
            pts.append((x1, y0 + (y1 - y0) * v10 / (v10 - v11)))
        if len(pts) == 2:
            segments.append((pts[0], pts[1]))
        elif len(pts) == 4:
            # saddle cell: pair crossings by the sign of the center value
            center = 0.25 * (v00 + v10 + v01 + v11)
            if (v00 > 0) == (center > 0):
                segments.append((pts[0], pts[2]))
                segments.append((pts[1], pts[3]))
            else:
                segments.append((pts[0], pts[3]))
                segments.append((pts[1], pts[2]))
    return segments


def _chain_segments(segments, digits=9):
    """Join shared-endpoint segments into polylines (greedy adjacency walk)."""
    key = lambda p: (round(p[0], digits), round(p[1], digits))
    adjacency: dict = {}
    for idx, (a, b) in enumerate(segments):
        adjacency.setdefault(key(a), []).append(idx)
        adjacency.setdefault(key(b), []).append(idx)
    used = [False] * len(segments)
    polylines = []
    for start, (a, b) in enumerate(segments):
        if used[start]:
            continue
        used[start] = True
        chain = deque([a, b])
        for grow_tail in (True, False):
            while True:
                tip = chain[-1] if grow_tail else chain[0]
                tip_key = key(tip)
                nxt = next(
                    (i for i in adjacency.get(tip_key, ()) if not used[i]), None
                )
                if nxt is None:
                    break
                used[nxt] = True
                ca, cb = segments[nxt]
                other = cb if key(ca) == tip_key else ca
                if grow_tail:
                    chain.append(other)
                else:
                    chain.appendleft(other)
        polylines.append(np.array(chain))
    return polylines


def _cluster_seeds(seeds, radius):
    """Merge runs of adjacent seed cells into single seeds at their centroid.

    A curve crossing typically flags a couple of neighbouring cells; refining
    one representative per cluster is enough (roots are deduplicated again
    after refinement).
    """
    if not seeds.size:
        return seeds
    remaining = list(range(seeds.shape[0]))
    clusters = []
    while remaining:
        group = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for idx in remaining[:]:
                if any(np.abs(seeds[idx] - seeds[g]).max() <= radius for g in group):
                    group.append(idx)
                    remaining.remove(idx)
                    grew = True
        clusters.append(seeds[group].mean(axis=0))
    return np.array(clusters)


@dataclass(eq=False)
class ContourField:
    """Gridded determinant values with extracted zero curves and crossing seeds."""

    o_n_axis: np.ndarray
    o_p_axis: np.ndarray
    det_a: np.ndarray            # top-mode row dropped
    det_b: np.ndarray            # amplitude-sum row dropped
    phi: np.ndarray
    curves_a: list = field(default_factory=list)
    curves_b: list = field(default_factory=list)
    seeds: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["o_n", "o_prime", "det_a", "det_b", "phi"])
            for i, on in enumerate(self.o_n_axis):
                for j, op in enumerate(self.o_p_axis):
                    writer.writerow(
                        [f"{on:.10g}", f"{op:.10g}", f"{self.det_a[i, j]:.12e}",
                         f"{self.det_b[i, j]:.12e}", f"{self.phi[i, j]:.12e}"]
                    )

    def to_svg(self, path, asymptotes=None, marked=None):
        canvas = SvgCanvas(
            (self.o_n_axis[0], self.o_n_axis[-1]),
            (self.o_p_axis[0], self.o_p_axis[-1]),
            title="impact-equation zero contours",
        )
        for poly in self.curves_a:
            canvas.polyline(poly[:, 0], poly[:, 1], color="#2f5fbf")
        for poly in self.curves_b:
            canvas.polyline(poly[:, 0], poly[:, 1], color="#c03030")
        for o_n, o_p in self.seeds:
            canvas.circle(o_n, o_p, color="#caa002")
        if asymptotes is not None:
            for o_n, o_p in np.atleast_2d(np.asarray(asymptotes, float)):
                canvas.cross(o_n, o_p)
        if marked is not None:
            canvas.circle(marked[0], marked[1], r=6.0, color="#d22")
        canvas.write(path)


def scan_contour(spectra: SpectrumPair, grid: GridSpec | None = None) -> ContourField:
    """Evaluate both determinants on a grid; extract zero curves and seeds.

    Seeds are centers of grid cells in which both determinants change sign,
    i.e. candidate curve intersections to be refined by ``refine_root``.
    """
    grid = grid or GridSpec()
    o_n_axis, o_p_axis = grid.axes()
    M = cauchy_matrix(spectra.lam, spectra.lam_prime)
    eta_vec = cauchy_eta(spectra.lam, spectra.lam_prime)
    det_a, det_b = _det_grids(spectra, M, eta_vec, o_n_axis, o_p_axis)
    sa, sb = np.sign(det_a), np.sign(det_b)

    def _changes(s):
        return (
            (s[:-1, :-1] != s[1:, :-1])
            | (s[:-1, :-1] != s[:-1, 1:])
            | (s[1:, 1:] != s[1:, :-1])
            | (s[1:, 1:] != s[:-1, 1:])
        )

    both = _changes(sa) & _changes(sb)
    ii, jj = np.nonzero(both)
    seeds = np.column_stack(
        [
            0.5 * (o_n_axis[ii] + o_n_axis[ii + 1]),
            0.5 * (o_p_axis[jj] + o_p_axis[jj + 1]),
        ]
    )
    seeds = _cluster_seeds(seeds, 1.1 * grid.step)
    return ContourField(
        o_n_axis=o_n_axis,
        o_p_axis=o_p_axis,
        det_a=det_a,
        det_b=det_b,
        phi=det_a * det_b,
        curves_a=_chain_segments(_cell_crossings(o_n_axis, o_p_axis, det_a)),
        curves_b=_chain_segments(_cell_crossings(o_n_axis, o_p_axis, det_b)),
        seeds=seeds,
    )


# ------------------------------------------------------------------ refinement

@dataclass(frozen=True)
class ImpactTimes:
    """Converged impact times with their phase coordinates and residuals."""

    tau: float
    tau_prime: float
    o_n: float
    o_prime: float
    mu: float
    residual: tuple
    iterations: int = 0


def refine_root(seed, spectra: SpectrumPair, M, eta_vec, *, max_iter=100,
                tol_residual=1e-11, tol_step=1e-12, fd_step=1e-6) -> ImpactTimes:
    """Damped Newton refinement of a contour seed in impact-phase coordinates.

    The residual is the pair of normalized determinants; the Jacobian is
    forward finite differences with step ``fd_step``.  Steps that leave the
    positive quadrant or increase the residual norm are halved.  Convergence
    requires both residuals below ``tol_residual`` and the last full Newton
    step below ``tol_step``.
    """
    o = np.asarray(seed, float).copy()
    if o.shape != (2,) or o.min() <= 0:
        raise InvalidParameterError(f"seed must be two positive phases, got {seed!r}")

    def residual(pt):
        return impact_residual(pt, spectra, M, eta_vec)

    F = residual(o)
    for iteration in range(1, max_iter + 1):
        J = np.empty((2, 2))
        for j in range(2):
            probe = o.copy()
            probe[j] += fd_step
            J[:, j] = (residual(probe) - F) / fd_step
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian during refinement") from None
        if np.abs(F).max() < tol_residual and np.abs(step).max() < tol_step:
            tau, tau_prime = spectra.from_phase(o[0], o[1])
            return ImpactTimes(
                tau=tau,
                tau_prime=tau_prime,
                o_n=float(o[0]),
                o_prime=float(o[1]),
                mu=tau / tau_prime,
                residual=(float(F[0]), float(F[1])),
                iterations=iteration,
            )
        damping = 1.0
        accepted = False
        for _ in range(40):
            cand = o + damping * step
            if cand.min() > 0:
                F_cand = residual(cand)
                if np.abs(F_cand).max() <= np.abs(F).max() or damping * np.abs(step).max() < 1e-14:
                    o, F = cand, F_cand
                    accepted = True
                    break
            damping *= 0.5
        if not accepted:
            raise ConvergenceError(
                f"refinement stalled at o = {o.tolist()} (residual {np.abs(F).max():.2e})"
            )
    raise ConvergenceError(f"no convergence after {max_iter} iterations from seed {seed!r}")


# ---------------------------------------------------- matching matrix and weights

def assemble_impact_matrix(spectral: SpectralData, tau: float, tau_prime: float):
    """Full (2N+1) x 2N matching matrix A and its rank gap.

    Rows stack position matching, velocity matching, and the contact-coordinate
    acceleration; columns are the free weights, contact weights, and the static
    force.  The rank gap is min/max singular value of the column-normalized
    matrix (column scaling is rank-preserving and removes the arbitrary
    hyperbolic magnitude spread); it drops below ~1e-10 at genuine solutions.
    """
    n = spectral.n
    X = spectral.mode_matrix
    Xp = spectral.mode_matrix_prime
    g, gd = mode_motion_vec(tau, spectral.lam, spectral.sigma)
    gp, gpd = mode_motion_vec(-tau_prime, spectral.lam_prime, spectral.sigma_prime)
    A = np.zeros((2 * n + 1, 2 * n))
    A[:n, :n] = X * g[None, :]
    A[:n, n : 2 * n - 1] = -Xp * gp[None, :]
    A[:n, -1] = -spectral.contact_compliance
    A[n : 2 * n, :n] = X * gd[None, :]
    A[n : 2 * n, n : 2 * n - 1] = -Xp * gpd[None, :]
    A[2 * n, :n] = X[-1, :] * (-spectral.lam * g)
    col_norms = np.linalg.norm(A, axis=0)
    sv = np.linalg.svd(A / col_norms[None, :], compute_uv=False)
    return A, float(sv[-1] / sv[0])


def reduction_gap(spectral: SpectralData, tau: float, tau_prime: float) -> float:
    """Max-abs deviation of the rank-preserving reduction of the matching matrix.

    Left/right multipliers built from the mode matrix and kernels must map A
    onto the block form [[I, M, 1/lam], [0, U, 1/lam], [0, sum(eta) * ones]];
    the map is an identity in exact arithmetic at any non-pole times, so the
    returned gap measures only rounding.  Exercised as a property test.
    """
    n = spectral.n
    X = spectral.mode_matrix
    lam = spectral.lam
    spectra = spectral.spectra
    M = cauchy_matrix(lam, spectral.lam_prime)
    eta_vec = cauchy_eta(lam, spectral.lam_prime)
    A, _ = assemble_impact_matrix(spectral, tau, tau_prime)
    g, gd = mode_motion_vec(tau, lam, spectral.sigma)
    gp, _ = mode_motion_vec(-tau_prime, spectral.lam_prime, spectral.sigma_prime)
    X_inv = np.linalg.inv(X)
    row_n = X[-1, :]
    D1 = X_inv / row_n[:, None]
    D2 = -(g / (gd * row_n))[:, None] * X_inv
    S_left = np.zeros((2 * n + 1, 2 * n + 1))
    S_left[:n, :n] = D1
    S_left[n : 2 * n, :n] = D1
    S_left[n : 2 * n, n : 2 * n] = D2
    S_left[2 * n, :n] = (eta_vec * lam) @ D1
    S_left[2 * n, 2 * n] = 1.0
    S_right = np.diag(np.concatenate([row_n / g, -1.0 / gp, [-1.0 / spectral.norm_const]]))
    U = _u_matrix(tau, tau_prime, spectra, M)
    target = np.zeros((2 * n + 1, 2 * n))
    target[:n, :n] = np.eye(n)
    target[:n, n : 2 * n - 1] = M
    target[:n, -1] = 1.0 / lam
    target[n : 2 * n, n : 2 * n - 1] = U
    target[n : 2 * n, -1] = 1.0 / lam
    target[2 * n, n:] = np.sum(eta_vec)
    return float(np.abs(S_left @ A @ S_right - target).max())


def alt_impact_residual(spectra: SpectrumPair, tau: float, tau_prime: float) -> np.ndarray:
    """Impact equations in bracketed form, valid where the reduced block is invertible.

    Returns [lam_N U_N; sum(eta) ones] inv(U-bar) (1/lam-bar) - [1; sum(eta)],
    a two-vector that vanishes at solutions together with the determinant form.
    """
    M = cauchy_matrix(spectra.lam, spectra.lam_prime)
    eta_vec = cauchy_eta(spectra.lam, spectra.lam_prime)
    U = _u_matrix(tau, tau_prime, spectra, M)
    u_bar = U[:-1, :]
    rhs = np.linalg.solve(u_bar, 1.0 / spectra.lam[:-1])
    eta_sum = float(np.sum(eta_vec))
    lhs = np.array([spectra.lam[-1] * U[-1, :] @ rhs, eta_sum * np.sum(rhs)])
    return lhs - np.array([1.0, eta_sum])


def solve_weights(spectral: SpectralData, times: ImpactTimes):
    """Mode weights (q, q') from the top-left (2N-1) square of the matching matrix.

    Solves [[X*g, -X'*g'], [Xbar*gdot, -X'bar*g'dot]] [q; q'] = [x0; 0] and
    returns the weights with the absolute residual of the solve.

    For highly symmetric models (e.g. all-odd free kernels) the square
    subsystem can be singular at a genuine root even though the full matching
    matrix has its proper one-dimensional kernel; in that case the weights are
    recovered from that kernel, scaled to the static force, and still satisfy
    the square system (the returned residual certifies it).
    """
    n = spectral.n
    X = spectral.mode_matrix
    Xp = spectral.mode_matrix_prime
    g, gd = mode_motion_vec(times.tau, spectral.lam, spectral.sigma)
    gp, gpd = mode_motion_vec(-times.tau_prime, spectral.lam_prime, spectral.sigma_prime)
    W = np.zeros((2 * n - 1, 2 * n - 1))
    W[:n, :n] = X * g[None, :]
    W[:n, n:] = -Xp * gp[None, :]
    W[n:, :n] = X[: n - 1, :] * gd[None, :]
    W[n:, n:] = -Xp[: n - 1, :] * gpd[None, :]
    rhs = np.concatenate([spectral.static_offset, np.zeros(n - 1)])
    cond = np.linalg.cond(W)
    if np.isfinite(cond) and cond < 1e12:
        sol = np.linalg.solve(W, rhs)
    else:
        A, rank_gap = assemble_impact_matrix(spectral, times.tau, times.tau_prime)
        if rank_gap > 1e-6:
            raise DegenerateSolutionError(
                f"weight subsystem singular (cond {cond:.2e}) away from a root"
            )
        kernel = np.linalg.svd(A)[2][-1]
        compliance = spectral.contact_compliance
        denom = float(compliance @ compliance)
        force = float(spectral.static_offset @ compliance) / denom if denom > 0 else 0.0
        if force == 0.0:
            sol = np.zeros(2 * n - 1)
        elif abs(kernel[-1]) < 1e-9:
            raise DegenerateSolutionError(
                "matching-matrix kernel has no static-force component"
            )
        else:
            sol = (kernel / kernel[-1] * force)[:-1]
    residual = float(np.abs(W @ sol - rhs).max())
    return sol[:n], sol[n:], residual


@dataclass(frozen=True, eq=False)
class ImpactSolution:
    """A refined root together with its weights and certification numbers."""

    times: ImpactTimes
    q: np.ndarray
    q_prime: np.ndarray
    spectral: SpectralData
    rank_gap: float
    weight_residual: float

    def to_dict(self) -> dict:
        return {
            "tau": self.times.tau,
            "tau_prime": self.times.tau_prime,
            "o_n": self.times.o_n,
            "o_prime": self.times.o_prime,
            "mu": self.times.mu,
            "residual": list(self.times.residual),
            "iterations": self.times.iterations,
            "q": self.q.tolist(),
            "q_prime": self.q_prime.tolist(),
            "rank_gap": self.rank_gap,
            "weight_residual": self.weight_residual,
        }


def build_solution(spectral: SpectralData, times: ImpactTimes) -> ImpactSolution:
    """Assemble the matching matrix, certify the rank drop, and solve the weights."""
    _, rank_gap = assemble_impact_matrix(spectral, times.tau, times.tau_prime)
    q, q_prime, weight_residual = solve_weights(spectral, times)
    return ImpactSolution(
        times=times,
        q=q,
        q_prime=q_prime,
        spectral=spectral,
        rank_gap=rank_gap,
        weight_residual=weight_residual,
    )
