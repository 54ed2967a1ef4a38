"""Normal-mode analysis of the free and contact phases.

The free-phase eigenproblem m^{-1} k X = X diag(lam) is solved by symmetric
reduction through a Cholesky factor of the mass matrix, which guarantees a
real spectrum for positive-definite m.  Columns of the mode matrix X are
normalized so that c X^T m X = I with X[-1, -1] = 1, and signs are fixed so
the contact row of X is strictly positive (the sign flips are absorbed by the
mode weights, so trajectories are unaffected).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .cauchy import cauchy_matrix
from .errors import (
    DegenerateSpectrumError,
    InterlacingError,
    NormalizationError,
    ZeroModeError,
)
from .model import ModelSpec, SpectrumPair

__all__ = [
    "SpectralData",
    "normal_modes",
    "constrained_spectrum",
    "constrained_modes",
    "static_offset",
    "analyze",
]

DEGENERACY_RTOL = 1e-9
ZERO_MODE_RTOL = 1e-12


def _sym_eig(mass, stiffness):
    """Eigenpairs of m^{-1} k via Cholesky reduction; eigenvectors satisfy V^T m V = I."""
    chol = np.linalg.cholesky(mass)
    chol_inv = np.linalg.inv(chol)
    reduced = chol_inv @ stiffness @ chol_inv.T
    lam, vecs = np.linalg.eigh(reduced)
    return lam, chol_inv.T @ vecs


def _check_spectrum(lam, label, allow_zero=False):
    scale = np.abs(lam).max()
    gaps = np.diff(lam)
    if gaps.size and gaps.min() < DEGENERACY_RTOL * scale:
        raise DegenerateSpectrumError(f"degenerate {label} spectrum: {lam.tolist()}")
    if not allow_zero and np.abs(lam).min() < ZERO_MODE_RTOL * scale:
        raise ZeroModeError(f"{label} spectrum contains a (numerically) zero eigenvalue")


def normal_modes(model: ModelSpec):
    """Free-phase spectrum, mode matrix and normalization constant (lam, X, c).

    Column signs are fixed so the contact row is positive; a mode with zero
    contact amplitude keeps its eigensolver sign (decoupled systems are legal
    here, though ``analyze`` rejects them because the impact equations need
    every mode to reach the contact coordinate).
    """
    lam, vecs = _sym_eig(model.mass, model.stiffness)
    _check_spectrum(lam, "free")
    contact_row = vecs[-1, :]
    if abs(contact_row[-1]) < 1e-9 * np.linalg.norm(vecs, axis=0).max():
        raise NormalizationError(
            "the top mode has (numerically) zero amplitude on the contact coordinate"
        )
    c = contact_row[-1] ** 2
    signs = np.where(contact_row != 0, np.sign(contact_row), 1.0)
    X = vecs * signs / abs(contact_row[-1])
    return lam, X, float(c)


def constrained_spectrum(model: ModelSpec) -> np.ndarray:
    """Ascending eigenvalues of the contact phase (last coordinate removed).

    A zero contact eigenvalue is allowed here: a non-singular stiffness can
    have a singular contact block, which is exactly the existence boundary
    that the gate reports downstream.
    """
    lam_prime, _ = _sym_eig(model.mass[:-1, :-1], model.stiffness[:-1, :-1])
    _check_spectrum(lam_prime, "contact", allow_zero=True)
    return lam_prime


def constrained_modes(X: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Contact-phase mode matrix X' = (X * X[-1]) M; its last row vanishes."""
    return (X * X[-1, :][None, :]) @ M


def static_offset(model: ModelSpec) -> np.ndarray:
    """Static equilibrium offset x0: last column of k^{-1} times the static force."""
    rhs = np.zeros(model.n)
    rhs[-1] = model.static_force
    return np.linalg.solve(model.stiffness, rhs)


def _check_interlacing(lam, lam_prime):
    merged = np.empty(2 * lam.size - 1)
    merged[0::2] = lam
    merged[1::2] = lam_prime
    if not np.all(np.diff(merged) > 0):
        raise InterlacingError(
            f"free/contact spectra do not strictly interlace: {lam.tolist()} / {lam_prime.tolist()}"
        )


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Complete mode data of a model: spectra, mode matrices, normalization, offset."""

    lam: np.ndarray
    mode_matrix: np.ndarray
    norm_const: float
    lam_prime: np.ndarray
    mode_matrix_prime: np.ndarray
    static_offset: np.ndarray
    sigma: np.ndarray
    sigma_prime: np.ndarray

    @property
    def n(self) -> int:
        return self.lam.shape[0]

    @cached_property
    def spectra(self) -> SpectrumPair:
        return SpectrumPair(self.lam, self.lam_prime, self.sigma, self.sigma_prime)

    @cached_property
    def mass_matrix(self) -> np.ndarray:
        # c X^T m X = I  =>  m^{-1} = c X X^T
        return np.linalg.inv(self.norm_const * self.mode_matrix @ self.mode_matrix.T)

    @cached_property
    def stiffness_matrix(self) -> np.ndarray:
        # k^{-1} = c X diag(1/lam) X^T
        kinv = self.norm_const * (self.mode_matrix / self.lam[None, :]) @ self.mode_matrix.T
        return np.linalg.inv(kinv)

    @cached_property
    def contact_compliance(self) -> np.ndarray:
        """Last column of k^{-1}, expressed through the mode data."""
        return self.norm_const * self.mode_matrix @ (self.mode_matrix[-1, :] / self.lam)


def analyze(model: ModelSpec) -> SpectralData:
    """Full spectral analysis of a model, with interlacing verified.

    Rejects models in which some mode has zero amplitude on the contact
    coordinate: such a mode never exchanges energy through the contact and
    the squared-amplitude vector eta degenerates.
    """
    lam, X, c = normal_modes(model)
    if np.abs(X[-1, :]).min() < 1e-9:
        raise NormalizationError(
            "a mode has (numerically) zero amplitude on the contact coordinate"
        )
    lam_prime = constrained_spectrum(model)
    _check_interlacing(lam, lam_prime)
    M = cauchy_matrix(lam, lam_prime)
    X_prime = constrained_modes(X, M)
    x0 = static_offset(model)
    for arr in (lam, X, lam_prime, X_prime, x0):
        arr.setflags(write=False)
    return SpectralData(
        lam=lam,
        mode_matrix=X,
        norm_const=c,
        lam_prime=lam_prime,
        mode_matrix_prime=X_prime,
        static_offset=x0,
        sigma=model.sigma,
        sigma_prime=model.sigma_prime,
    )
