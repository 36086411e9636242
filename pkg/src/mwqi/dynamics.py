"""Rotating-wave drift matrix, stability and RWA validity of one device."""

from __future__ import annotations

import math
from typing import NamedTuple, Optional

import numpy as np

from .model import DeviceParams, FeedbackParams, ParameterError, feedback_coupling


class Stability(NamedTuple):
    stable: bool
    min_decay: float
    eigenvalues: np.ndarray


class RWAValidity(NamedTuple):
    valid: bool
    margin: float


class NumericError(RuntimeError):
    """Raised when an eigenvalue or linear solve fails."""


def drift_matrix(device: DeviceParams, fb: Optional[FeedbackParams] = None) -> np.ndarray:
    """Drift matrix of the RWA Langevin equations in the basis ``(c_w, c_o^dagger, b)``.

    Rows::

        c_w   : (-kappa_w,  mu,         -i G_w)
        c_o^+ : (0,         -kappa_o,   i G_o^*)
        b     : (-i G_w^*,  -i G_o,     -gamma_M)

    ``mu`` is the feedback coupling, nonzero only for the transmitter.
    """
    if fb is not None and device.role != "transmitter":
        raise ParameterError("feedback is only defined for the transmitter")
    G_w, G_o = device.G_w, device.G_o
    mu = feedback_coupling(device, fb)
    return np.array(
        [
            [-device.kappa_w, mu, -1j * G_w],
            [0.0, -device.kappa_o, 1j * np.conj(G_o)],
            [-1j * np.conj(G_w), -1j * G_o, -device.gamma_M],
        ],
        dtype=complex,
    )


def stability(drift: np.ndarray) -> Stability:
    """Stable iff every eigenvalue has a negative real part.

    ``min_decay`` is the smallest ``-Re(lambda)``; it sets the bandwidth used to
    convert an integration time into a number of independent copies.
    """
    try:
        eigenvalues = np.linalg.eigvals(drift)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue computation failed: {exc}") from exc
    if not np.all(np.isfinite(eigenvalues)):
        raise NumericError("non-finite eigenvalues")
    min_decay = float(np.min(-eigenvalues.real))
    return Stability(bool(min_decay > 0.0), min_decay, eigenvalues)


def device_stability(device: DeviceParams, fb: Optional[FeedbackParams] = None) -> Stability:
    return stability(drift_matrix(device, fb))


def rwa_validity(
    device: DeviceParams, fb: Optional[FeedbackParams] = None, threshold: float = 0.1
) -> RWAValidity:
    """Largest interaction strength relative to ``omega_M``; valid below ``threshold``."""
    mu = feedback_coupling(device, fb) if device.role == "transmitter" else 0j
    margin = max(abs(device.G_w), abs(device.G_o), abs(mu)) / device.omega_M
    return RWAValidity(bool(margin < threshold), float(margin))


def copies_for_time(min_decay: float, duration: float) -> int:
    """Number of independent signal-idler copies ``floor(min_decay * duration / 2 pi)``.

    The bandwidth in Hz is taken as ``min_decay / 2 pi``.
    """
    if not min_decay > 0:
        raise ValueError(f"decay rate must be positive, got {min_decay!r}")
    if duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration!r}")
    # Guard against floor() dropping an exact integer through rounding.
    return int(math.floor(min_decay * duration / (2.0 * math.pi) * (1.0 + 1e-12)))
