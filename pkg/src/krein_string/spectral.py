"""Spectral data of the string: orthogonal polynomials, eigenvalues, weights.

The polynomials phi_n(lam) solve the three-term Cauchy problem

    a_n phi_{n+1} + a_{n-1} phi_{n-1} + b_n phi_n = lam m_n phi_n,
    phi_0 = 0, phi_1 = 1,

and lam is an eigenvalue of A phi = lam M phi exactly when the terminal
value phi_N(lam) vanishes.  Eigenvalues are computed through the symmetric
reduction M^{-1/2} A M^{-1/2} and a tridiagonal eigensolver; eigenvectors
are mapped back and rescaled to first component one.  The weights
omega_k = (M phi^k, phi^k) define the step spectral function
mu(lam) = sum_{lam_k < lam} 1/omega_k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DegenerateSpectrumError
from .model import SystemMatrices

# Relative eigenvalue gap below which the spectrum is reported degenerate;
# the finite string always has simple spectrum, so this flags bad scaling.
GAP_TOL = 1e-10

RESCALE_TOL = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalues (ascending, all negative), eigenvectors with phi_1 = 1
    stored as rows of ``vectors``, and positive weights omega_k."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        for name in ("eigenvalues", "vectors", "weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_modes(self) -> int:
        return len(self.eigenvalues)

    @property
    def frequencies(self) -> np.ndarray:
        """Modal frequencies sqrt(|lambda_k|)."""
        return np.sqrt(-self.eigenvalues)


def evaluate_polynomials(mats: SystemMatrices, lam: float) -> np.ndarray:
    """Run the Cauchy recursion; returns (phi_1(lam), ..., phi_N(lam)).

    The terminal entry phi_N vanishes exactly at eigenvalues of the
    generalized problem.
    """
    a = mats.couplings
    b = mats.diag
    m = mats.masses
    n_state = mats.order
    out = np.empty(n_state + 1)
    phi_prev = 0.0
    phi = 1.0
    out[0] = phi
    for n in range(1, n_state + 1):
        phi_next = ((lam * m[n - 1] - b[n - 1]) * phi - a[n - 1] * phi_prev) / a[n]
        phi_prev, phi = phi, phi_next
        out[n] = phi
    return out


def compute_spectral_data(mats: SystemMatrices) -> SpectralData:
    """Eigenvalues, normalized eigenvectors, and weights of A phi = lam M phi."""
    m = mats.masses
    sqrt_m = np.sqrt(m)
    d = mats.diag / m
    e = mats.off_diag / (sqrt_m[:-1] * sqrt_m[1:]) if mats.order > 1 else np.empty(0)
    lam, sym_vecs = eigh_tridiagonal(d, e)

    if mats.order > 1:
        gaps = np.diff(lam) / np.max(np.abs(lam))
        worst = int(np.argmin(gaps))
        if gaps[worst] < GAP_TOL:
            raise DegenerateSpectrumError(
                f"near-multiple eigenvalues: relative gap {gaps[worst]:.3e} "
                f"between modes {worst + 1} and {worst + 2} "
                f"(lambda={lam[worst]:.6e}, {lam[worst + 1]:.6e})"
            )

    vecs = sym_vecs / sqrt_m[:, None]
    first = vecs[0, :]
    if np.any(np.abs(first) < RESCALE_TOL):
        bad = int(np.argmin(np.abs(first)))
        raise DegenerateSpectrumError(
            f"eigenvector {bad + 1} has first component {first[bad]:.3e}; "
            "cannot normalize to phi_1 = 1"
        )
    vecs = vecs / first
    weights = np.sum(m[:, None] * vecs**2, axis=0)
    return SpectralData(eigenvalues=lam, vectors=vecs.T, weights=weights)


def spectral_function(data: SpectralData, lam: float) -> float:
    """Right-continuous step function mu(lam) = sum_{lam_k < lam} 1/omega_k."""
    below = data.eigenvalues < lam
    if not np.any(below):
        return 0.0
    return float(np.sum(1.0 / data.weights[below]))
