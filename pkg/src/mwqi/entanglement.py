"""Logarithmic negativity of the two-mode Gaussian signal/idler state.

Quadratures are ``x = (a + a^+)/sqrt(2)``, ``p = (a - a^+)/(i sqrt(2))``, so the
vacuum variance is 1/2. The logarithm is natural.
"""

from __future__ import annotations

import math

import numpy as np

from .spectra import SpectralMoments

OMEGA_2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SYMPLECTIC_FORM = np.kron(np.eye(2), OMEGA_2)
PT_FLIP = np.diag([1.0, 1.0, 1.0, -1.0])
SEPARABILITY_TOL = 1e-12


class UnphysicalStateError(ValueError):
    """Covariance matrix violates the uncertainty principle."""


def covariance_matrix(n_w: float, n_o: float, m: complex) -> np.ndarray:
    """Symmetrized quadrature covariance in the order (x_w, p_w, x_o, p_o)."""
    a = n_w + 0.5
    b = n_o + 0.5
    c = np.array([[m.real, m.imag], [m.imag, -m.real]])
    V = np.zeros((4, 4))
    V[:2, :2] = a * np.eye(2)
    V[2:, 2:] = b * np.eye(2)
    V[:2, 2:] = c
    V[2:, :2] = c.T
    return V


def symplectic_eigenvalues(V: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues (moduli of the eigenvalues of ``i Omega V``)."""
    ev = np.abs(np.linalg.eigvals(1j * SYMPLECTIC_FORM @ V))
    ev = np.sort(ev)
    # Eigenvalues come in +- pairs.
    return ev[::2]


def is_bona_fide(V: np.ndarray, tol: float = 1e-9) -> bool:
    """Uncertainty principle ``V + i Omega / 2 >= 0`` (up to ``tol``)."""
    return bool(np.min(np.linalg.eigvalsh(V + 0.5j * SYMPLECTIC_FORM)) >= -tol)


def _moments(moments) -> tuple[float, float, complex]:
    if isinstance(moments, SpectralMoments):
        return moments.n_w, moments.n_o, moments.m
    n_w, n_o, m = moments
    return float(n_w), float(n_o), complex(m)


def log_negativity(moments, tol: float = 1e-9) -> float:
    """``E_N = max(0, -ln(2 nu_min))`` of the partially transposed state (values below 1e-12 read as 0)."""
    n_w, n_o, m = _moments(moments)
    V = covariance_matrix(n_w, n_o, m)
    if not is_bona_fide(V, tol=max(tol, 1e-12 * (1.0 + n_w + n_o))):
        raise UnphysicalStateError(
            f"moments (n_w={n_w:.6g}, n_o={n_o:.6g}, |m|={abs(m):.6g}) are not a physical state"
        )
    nu = symplectic_eigenvalues(PT_FLIP @ V @ PT_FLIP)[0]
    e_n = -math.log(2.0 * nu)
    # Roundoff at the separability boundary |m|^2 = n_w n_o.
    return e_n if e_n > SEPARABILITY_TOL else 0.0


def normalized_log_negativity(moments) -> float:
    """Logarithmic negativity per signal photon, ``E_N / n_w``."""
    n_w, n_o, m = _moments(moments)
    e_n = log_negativity((n_w, n_o, m))
    if n_w <= 0.0:
        if e_n == 0.0:
            return 0.0
        raise ZeroDivisionError("E_N > 0 with no signal photons")
    return e_n / n_w
