"""Trajectory assembly between the two symmetry points, validation, and export.

The emitted trajectory covers the half cycle from the free-phase symmetry
point (t = 0) through the impact (t = tau) to the contact-phase symmetry
point (t = tau + tau'); the rest of the period follows by the solution's
time-reversal symmetries.  Physical realizability, however, must hold on the
*full* phases, which extend symmetrically about each symmetry point, so the
validator re-samples t in [-tau, tau] and the contact phase in
[-tau', tau'] analytically when checking ground clearance and contact force.

The conserved energy is the plain mechanical one, E = (xd^T m xd + x^T k x)/2:
the contact constraint force acts on a fixed coordinate and does no work, so
one scalar is constant and continuous across both phases.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .impact import ImpactSolution, ImpactTimes, mode_motion_vec
from .model import ModelSpec
from .spectral import SpectralData
from .svgout import SvgCanvas

__all__ = [
    "Trajectory",
    "ValidatorTolerances",
    "ValidationReport",
    "synthesize",
    "validate",
    "to_csv",
    "to_json",
    "to_svg",
    "trajectory_from_json",
]

PHASE_FREE = 0
PHASE_CONTACT = 1
_PHASE_NAMES = {PHASE_FREE: "unconstrained", PHASE_CONTACT: "constrained"}


def _free_state(spectral: SpectralData, q, t):
    """Analytic x, xd, xdd in the free phase at times t (array)."""
    g, gd = mode_motion_vec(t, spectral.lam, spectral.sigma)
    X = spectral.mode_matrix
    x = (g * q) @ X.T
    xd = (gd * q) @ X.T
    xdd = ((-spectral.lam * g) * q) @ X.T
    return x, xd, xdd


def _contact_state(spectral: SpectralData, q_prime, u):
    """Analytic x, xd, xdd in the contact phase at offsets u from its symmetry point."""
    gp, gpd = mode_motion_vec(u, spectral.lam_prime, spectral.sigma_prime)
    Xp = spectral.mode_matrix_prime
    x = (gp * q_prime) @ Xp.T + spectral.static_offset[None, :]
    xd = (gpd * q_prime) @ Xp.T
    xdd = ((-spectral.lam_prime * gp) * q_prime) @ Xp.T
    return x, xd, xdd


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled half-cycle with per-sample energy and contact force.

    ``t`` runs from 0 (free symmetry point) to tau + tau' (contact symmetry
    point); ``phase`` is 0 on [0, tau] and 1 afterwards; ``constraint_force``
    is NaN on free samples.
    """

    t: np.ndarray
    phase: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    xddot: np.ndarray
    energy: np.ndarray
    constraint_force: np.ndarray
    tau_mark: float
    meta: ImpactSolution

    @property
    def n(self) -> int:
        return self.x.shape[1]


def synthesize(spectral: SpectralData, solution: ImpactSolution,
               samples_per_phase: int = 500) -> Trajectory:
    """Sample the half-cycle trajectory analytically (no integration).

    Each phase contributes ``samples_per_phase`` intervals; the impact sample
    is shared, so the total row count is 2 * samples_per_phase + 1.
    """
    if samples_per_phase < 1:
        raise InvalidParameterError("samples_per_phase must be >= 1")
    times = solution.times
    tau, taup = times.tau, times.tau_prime
    t_free = np.linspace(0.0, tau, samples_per_phase + 1)
    t_contact = np.linspace(tau, tau + taup, samples_per_phase + 1)[1:]
    x_f, xd_f, xdd_f = _free_state(spectral, solution.q, t_free)
    u_contact = t_contact - (tau + taup)
    x_c, xd_c, xdd_c = _contact_state(spectral, solution.q_prime, u_contact)
    x = np.vstack([x_f, x_c])
    xd = np.vstack([xd_f, xd_c])
    xdd = np.vstack([xdd_f, xdd_c])
    t = np.concatenate([t_free, t_contact])
    phase = np.concatenate(
        [np.zeros(t_free.size, dtype=int), np.ones(t_contact.size, dtype=int)]
    )
    mass = spectral.mass_matrix
    stiffness = spectral.stiffness_matrix
    energy = 0.5 * np.einsum("ij,jk,ik->i", xd, mass, xd) + 0.5 * np.einsum(
        "ij,jk,ik->i", x, stiffness, x
    )
    force = np.full(t.size, np.nan)
    contact_rows = phase == PHASE_CONTACT
    force[contact_rows] = xdd_c @ mass[-1] + x_c @ stiffness[-1]
    return Trajectory(
        t=t,
        phase=phase,
        x=x,
        xdot=xd,
        xddot=xdd,
        energy=energy,
        constraint_force=force,
        tau_mark=tau,
        meta=solution,
    )


@dataclass(frozen=True)
class ValidatorTolerances:
    """Relative tolerances of the physical-realizability checks."""

    velocity: float = 1e-8
    acceleration: float = 1e-8
    continuity: float = 1e-10
    energy: float = 1e-9
    contact: float = 1e-8


@dataclass(frozen=True)
class ValidationReport:
    """Residuals and worst-case clearances of one trajectory.

    ``penetration_violation`` and ``contact_force_violation`` are the worst
    signed values of contact_sign * (x_N - x0_N) over the full free phase and
    contact_sign * F_N over the full contact phase; negative values beyond
    the contact tolerance (times the respective scale) fail the check.
    """

    impact_velocity_residual: float
    impact_accel_residual: float
    continuity_residual: float
    energy_variation: float
    penetration_violation: float
    contact_force_violation: float
    passed: bool
    tolerances: ValidatorTolerances = field(default_factory=ValidatorTolerances)

    def to_dict(self) -> dict:
        return {
            "impact_velocity_residual": self.impact_velocity_residual,
            "impact_accel_residual": self.impact_accel_residual,
            "continuity_residual": self.continuity_residual,
            "energy_variation": self.energy_variation,
            "penetration_violation": self.penetration_violation,
            "contact_force_violation": self.contact_force_violation,
            "passed": self.passed,
        }


def validate(traj: Trajectory, model: ModelSpec,
             tolerances: ValidatorTolerances | None = None,
             check_samples: int = 2001) -> ValidationReport:
    """Check impact conditions, conservation, clearance and contact force.

    Impact conditions and continuity are evaluated analytically from both
    phase formulas at the impact; energy variation comes from the trajectory
    samples; the clearance and force checks re-sample the full symmetric
    phases (t in [-tau, tau] and u in [-tau', tau']), where higher-branch
    roots reveal attractive-force stretches invisible on the emitted half.
    """
    tol = tolerances or ValidatorTolerances()
    spectral = traj.meta.spectral
    if model.n != traj.n:
        raise InvalidParameterError("model and trajectory dimensions differ")
    times = traj.meta.times
    tau, taup = times.tau, times.tau_prime
    q, qp = traj.meta.q, traj.meta.q_prime

    x_f, xd_f, xdd_f = _free_state(spectral, q, np.array([tau]))
    x_c, xd_c, _ = _contact_state(spectral, qp, np.array([-taup]))
    velocity_scale = max(np.abs(traj.xdot).max(), 1e-300)
    accel_scale = max(np.abs(traj.xddot).max(), 1e-300)
    v_resid = abs(xd_f[0, -1])
    a_resid = abs(xdd_f[0, -1])
    continuity = max(
        np.abs(x_f[0] - x_c[0]).max(), np.abs(xd_f[0] - xd_c[0]).max()
    )
    energy_scale = max(np.abs(traj.energy).max(), 1e-300)
    energy_var = float((traj.energy.max() - traj.energy.min()) / energy_scale)

    sign = model.contact_sign
    contact_level = spectral.static_offset[-1]
    t_full = np.linspace(-tau, tau, check_samples)
    x_full, _, _ = _free_state(spectral, q, t_full)
    clearance = sign * (x_full[:, -1] - contact_level)
    clearance_scale = max(np.abs(clearance).max(), 1e-300)
    penetration = float(clearance.min())

    u_full = np.linspace(-taup, taup, check_samples)
    xc_full, _, xddc_full = _contact_state(spectral, qp, u_full)
    force = sign * (xddc_full @ model.mass[-1] + xc_full @ model.stiffness[-1])
    force_scale = max(np.abs(force).max(), 1e-300)
    force_violation = float(force.min())

    passed = (
        v_resid < tol.velocity * velocity_scale
        and a_resid < tol.acceleration * accel_scale
        and continuity < tol.continuity * max(np.abs(traj.x).max(), velocity_scale)
        and energy_var < tol.energy
        and penetration >= -tol.contact * clearance_scale
        and force_violation >= -tol.contact * force_scale
    )
    return ValidationReport(
        impact_velocity_residual=float(v_resid),
        impact_accel_residual=float(a_resid),
        continuity_residual=float(continuity),
        energy_variation=energy_var,
        penetration_violation=penetration,
        contact_force_violation=force_violation,
        passed=bool(passed),
        tolerances=tol,
    )


# ------------------------------------------------------------------- exporters

def to_csv(traj: Trajectory, path):
    n = traj.n
    header = (
        ["t", "phase"]
        + [f"x{i + 1}" for i in range(n)]
        + [f"xd{i + 1}" for i in range(n)]
        + [f"xdd{i + 1}" for i in range(n)]
        + ["energy", "constraint_force"]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(traj.t.size):
            row = [f"{traj.t[i]:.12g}", _PHASE_NAMES[int(traj.phase[i])]]
            row += [f"{v:.12e}" for v in traj.x[i]]
            row += [f"{v:.12e}" for v in traj.xdot[i]]
            row += [f"{v:.12e}" for v in traj.xddot[i]]
            row.append(f"{traj.energy[i]:.12e}")
            force = traj.constraint_force[i]
            row.append("" if np.isnan(force) else f"{force:.12e}")
            writer.writerow(row)


def _spectral_to_dict(spectral: SpectralData) -> dict:
    return {
        "lam": spectral.lam.tolist(),
        "mode_matrix": spectral.mode_matrix.tolist(),
        "norm_const": spectral.norm_const,
        "lam_prime": spectral.lam_prime.tolist(),
        "mode_matrix_prime": spectral.mode_matrix_prime.tolist(),
        "static_offset": spectral.static_offset.tolist(),
        "sigma": spectral.sigma.tolist(),
        "sigma_prime": spectral.sigma_prime.tolist(),
    }


def _spectral_from_dict(data: dict) -> SpectralData:
    return SpectralData(
        lam=np.array(data["lam"]),
        mode_matrix=np.array(data["mode_matrix"]),
        norm_const=float(data["norm_const"]),
        lam_prime=np.array(data["lam_prime"]),
        mode_matrix_prime=np.array(data["mode_matrix_prime"]),
        static_offset=np.array(data["static_offset"]),
        sigma=np.array(data["sigma"], dtype=int),
        sigma_prime=np.array(data["sigma_prime"], dtype=int),
    )


def to_json(traj: Trajectory, path):
    """Serialize the trajectory with its full solution metadata (lossless)."""
    sol = traj.meta
    payload = {
        "t": traj.t.tolist(),
        "phase": traj.phase.tolist(),
        "x": traj.x.tolist(),
        "xdot": traj.xdot.tolist(),
        "xddot": traj.xddot.tolist(),
        "energy": traj.energy.tolist(),
        "constraint_force": [None if np.isnan(v) else v for v in traj.constraint_force],
        "tau_mark": traj.tau_mark,
        "solution": {
            **sol.to_dict(),
            "spectral": _spectral_to_dict(sol.spectral),
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def trajectory_from_json(path) -> Trajectory:
    with open(path) as fh:
        payload = json.load(fh)
    sol_data = payload["solution"]
    spectral = _spectral_from_dict(sol_data["spectral"])
    times = ImpactTimes(
        tau=sol_data["tau"],
        tau_prime=sol_data["tau_prime"],
        o_n=sol_data["o_n"],
        o_prime=sol_data["o_prime"],
        mu=sol_data["mu"],
        residual=tuple(sol_data["residual"]),
        iterations=sol_data["iterations"],
    )
    solution = ImpactSolution(
        times=times,
        q=np.array(sol_data["q"]),
        q_prime=np.array(sol_data["q_prime"]),
        spectral=spectral,
        rank_gap=sol_data["rank_gap"],
        weight_residual=sol_data["weight_residual"],
    )
    force = np.array(
        [np.nan if v is None else v for v in payload["constraint_force"]], dtype=float
    )
    return Trajectory(
        t=np.array(payload["t"]),
        phase=np.array(payload["phase"], dtype=int),
        x=np.array(payload["x"]),
        xdot=np.array(payload["xdot"]),
        xddot=np.array(payload["xddot"]),
        energy=np.array(payload["energy"]),
        constraint_force=force,
        tau_mark=payload["tau_mark"],
        meta=solution,
    )


_PALETTE = ["#c03030", "#2f8f2f", "#2f5fbf", "#b06f10", "#7d3fa0", "#2f8f8f"]


def to_svg(traj: Trajectory, path):
    """Plot x (solid), xdot (dashed) and xddot (dotted) per coordinate.

    One color per coordinate; a vertical line marks the impact.
    """
    lo = min(traj.x.min(), traj.xdot.min(), traj.xddot.min())
    hi = max(traj.x.max(), traj.xdot.max(), traj.xddot.max())
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    canvas = SvgCanvas(
        (traj.t[0], traj.t[-1]),
        (lo - pad, hi + pad),
        title="collisionless half-cycle (positions, velocities, accelerations)",
    )
    canvas.vline(traj.tau_mark, color="#888", dash="4,3")
    for i in range(traj.n):
        color = _PALETTE[i % len(_PALETTE)]
        canvas.polyline(traj.t, traj.x[:, i], color=color, width=1.6)
        canvas.polyline(traj.t, traj.xdot[:, i], color=color, width=1.1, dash="6,3")
        canvas.polyline(traj.t, traj.xddot[:, i], color=color, width=1.0, dash="1.5,2.5")
    canvas.write(path)
