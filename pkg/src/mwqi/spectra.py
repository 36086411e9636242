"""Input-noise covariance and the signal/idler spectral moments ``(n_w, n_o, m)``.

Inputs are handled at the microwave-side frequency ``omega`` in the ordered list

    b_in, c_w^(in,1), c_w^(in,2), c_o^(in,1)+, c_o^(in,2)+

so that both ``c_w^(out,1)(omega)`` and ``c_o^(out,1)(-omega)^dagger`` are linear
in them. For the transmitter the second microwave input is the feedback-modified
one; in the rotating frame only its resonant part survives,

    c_w^(in,2) = c_w^(in,2),bare - g_fb sqrt(eta/2) e^{i phi} c_o^(in,2)+ + g_fb sqrt(1-eta) X_nu,

which correlates it with ``c_o^(in,2)+``. The counter-rotating half of the
measured optical noise, ``-g_fb sqrt(eta/2) e^{-i phi} c_o^(in,2)`` shifted by
``2 omega_M``, samples the optical input far outside the band of interest; it is
kept as an independent vacuum input (``c_o_in2_mirror``) so the microwave port
stays thermal with ``<c c^+> = <c^+ c> + 1``. ``X_nu`` is real white detection
noise of variance 1/2 that contributes 1/2 to both operator orderings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import DeviceParams, FeedbackParams, ParameterError
from .transfer import TransferCoefficients, coefficients, coefficients_oracle

INPUT_LABELS = ("b_in", "c_w_in1", "c_w_in2", "c_o_in1_dag", "c_o_in2_dag")
PRIMITIVE_LABELS = (
    "b_in", "c_w_in1", "c_w_in2_bare", "c_o_in1_dag", "c_o_in2_dag", "x_nu", "c_o_in2_mirror",
)


class PhysicalityWarning(RuntimeWarning):
    """Moments violate the two-mode bound; indicates an assembly error."""


@dataclass(frozen=True)
class InputCovariance:
    """Second moments of the five effective inputs.

    ``normal[i, j] = <u_i^+ u_j>`` and ``anti[i, j] = <u_i u_j^+>`` (per unit
    bandwidth). ``mixing`` maps the primitive uncorrelated inputs
    (``PRIMITIVE_LABELS``) onto the effective ones.
    """

    normal: np.ndarray
    anti: np.ndarray
    mixing: np.ndarray
    kappa_ratio_port2: float

    @property
    def microwave_port2_occupation(self) -> float:
        return float(self.normal[2, 2].real)

    @property
    def microwave_occupation(self) -> float:
        """Occupation of the total microwave input ``(sqrt(k1) c1 + sqrt(k2) c2) / sqrt(k)``."""
        r2 = self.kappa_ratio_port2
        return float(((1.0 - r2) * self.normal[1, 1] + r2 * self.normal[2, 2]).real)

    @property
    def cross_correlation(self) -> complex:
        """``<c_o^(in,2) c_w^(in,2)>``, the feedback-induced microwave/optical input correlation."""
        # normal[2, 4] = <c_w2^+ c_o2^+>; its conjugate is the anti-normally ordered optical pair.
        return complex(np.conj(self.normal[2, 4]))


def input_covariance(
    device: DeviceParams, fb: Optional[FeedbackParams] = None, cross_terms: bool = True
) -> InputCovariance:
    """Assemble the effective input covariance of one device.

    With ``cross_terms=False`` the feedback noise keeps its occupation but its
    correlation with ``c_o^(in,2)`` is dropped (pure feedback-heated thermal input).
    """
    if fb is not None and device.role != "transmitter":
        raise ParameterError("feedback is only defined for the transmitter")
    n_M = device.n_mechanical
    n_w = device.n_microwave
    n_o = device.n_optical
    # Primitive inputs are mutually uncorrelated.
    prim_normal = np.diag([n_M, n_w, n_w, 1.0 + n_o, 1.0 + n_o, 0.5, n_o]).astype(complex)
    prim_anti = np.diag([1.0 + n_M, 1.0 + n_w, 1.0 + n_w, n_o, n_o, 0.5, 1.0 + n_o]).astype(complex)

    L = np.zeros((5, len(PRIMITIVE_LABELS)), dtype=complex)
    for i in range(5):
        L[i, i] = 1.0
    if fb is not None and fb.g_fb != 0.0:
        weight = fb.g_fb * math.sqrt(fb.eta / 2.0)
        phase = complex(math.cos(fb.phi), math.sin(fb.phi))
        L[2, 4] = -weight * phase
        L[2, 5] = fb.g_fb * math.sqrt(1.0 - fb.eta)
        L[2, 6] = -weight * phase.conjugate()

    # u = L v  =>  <u_i^+ u_j> = (L^* N L^T)_ij,  <u_i u_j^+> = (L Nbar L^H)_ij
    normal = L.conj() @ prim_normal @ L.T
    anti = L @ prim_anti @ L.conj().T
    if not cross_terms:
        mask = np.eye(5, dtype=bool)
        normal = np.where(mask, normal, 0.0)
        anti = np.where(mask, anti, 0.0)
    for arr in (normal, anti, L):
        arr.setflags(write=False)
    return InputCovariance(normal=normal, anti=anti, mixing=L, kappa_ratio_port2=1.0 - device.r_w)


@dataclass(frozen=True)
class SpectralMoments:
    """Signal photons ``n_w(omega)``, idler photons ``n_o(-omega)`` and their correlation ``m(omega)``."""

    omega: float
    n_w: float
    n_o: float
    m: complex

    @property
    def bound(self) -> float:
        return min(self.n_w * (1.0 + self.n_o), self.n_o * (1.0 + self.n_w))

    @property
    def physical_excess(self) -> float:
        """Relative amount by which ``|m|^2`` exceeds the two-mode bound (<= 0 when physical)."""
        scale = max(self.bound, 1e-300)
        return (abs(self.m) ** 2 - self.bound) / scale


def output_moments(
    coeffs: TransferCoefficients, cov: InputCovariance, omega: Optional[float] = None
) -> SpectralMoments:
    """Sandwich the output coefficient rows with the input covariance."""
    if omega is not None and omega != coeffs.omega:
        raise ValueError("coefficients were evaluated at a different frequency")
    alpha = coeffs.microwave_row
    beta = np.conj(coeffs.optical_row)  # row of c_o^(out,1)(-omega)^dagger
    n_w = float(np.real(alpha.conj() @ cov.normal @ alpha))
    n_o = float(np.real(beta @ cov.anti @ beta.conj()))
    m = complex(alpha @ cov.anti @ beta.conj())
    moments = SpectralMoments(omega=coeffs.omega, n_w=n_w, n_o=n_o, m=m)
    if moments.physical_excess > 1e-8:
        warnings.warn(
            f"|m|^2 exceeds the two-mode bound by {moments.physical_excess:.3g} (relative)",
            PhysicalityWarning,
            stacklevel=2,
        )
    return moments


def device_moments(
    device: DeviceParams,
    fb: Optional[FeedbackParams],
    omega: float,
    cross_terms: bool = True,
    oracle: bool = False,
) -> SpectralMoments:
    solver = coefficients_oracle if oracle else coefficients
    return output_moments(solver(device, fb, omega), input_covariance(device, fb, cross_terms))
