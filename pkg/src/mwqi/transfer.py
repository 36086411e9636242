"""Frequency-domain output coefficients of one device.

For a microwave-side frequency ``omega`` the two outputs of interest are

* ``c_w^(out,1)(omega) = Ap b_in + Bp c_w^(in,1) + Cp c_w^(in,2) + Dp c_o^(in,1)+ + Ep c_o^(in,2)+``
* ``c_o^(out,1)(-omega) = A b_in+ + B c_w^(in,1)+ + C c_w^(in,2)+ + D c_o^(in,1) + E c_o^(in,2)``

where every input on the first line is at ``omega`` and every input on the
second line at ``-omega``. Accordingly ``TransferCoefficients`` stores the
primed (microwave) coefficients evaluated at ``omega`` and the unprimed
(optical) coefficients evaluated at ``-omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynamics import NumericError, drift_matrix, device_stability
from .model import DeviceParams, FeedbackParams, ParameterError, feedback_coupling


class PoleError(ZeroDivisionError):
    """Raised when a susceptibility denominator vanishes."""


@dataclass(frozen=True)
class TransferCoefficients:
    omega: float
    A: complex
    B: complex
    C: complex
    D: complex
    E: complex
    Ap: complex
    Bp: complex
    Cp: complex
    Dp: complex
    Ep: complex
    # Intermediates, evaluated at the microwave-side frequency omega.
    psi: complex = 0j
    chi: complex = 0j
    Phi: complex = 0j
    stable: bool = True

    @property
    def optical_row(self) -> np.ndarray:
        """Coefficients of ``c_o^(out,1)(-omega)`` over (b+, c_w1+, c_w2+, c_o1, c_o2)."""
        return np.array([self.A, self.B, self.C, self.D, self.E], dtype=complex)

    @property
    def microwave_row(self) -> np.ndarray:
        """Coefficients of ``c_w^(out,1)(omega)`` over (b, c_w1, c_w2, c_o1+, c_o2+)."""
        return np.array([self.Ap, self.Bp, self.Cp, self.Dp, self.Ep], dtype=complex)

    def allclose(self, other: "TransferCoefficients", rtol: float = 1e-10) -> bool:
        a = np.concatenate([self.optical_row, self.microwave_row])
        b = np.concatenate([other.optical_row, other.microwave_row])
        scale = max(np.max(np.abs(a)), np.max(np.abs(b)), 1.0)
        return bool(np.max(np.abs(a - b)) <= rtol * scale)


def _denominator(rate: float, w: float) -> complex:
    value = complex(rate, -w)
    if value == 0:
        raise PoleError(f"susceptibility pole at rate={rate!r}, frequency={w!r}")
    return value


def _psi(G_w: complex, kw: complex, gm: complex) -> complex:
    return 1.0 / (1.0 + abs(G_w) ** 2 / (kw * gm))


def _Phi(mu: complex, G_o: complex, G_w: complex, kw: complex, gm: complex) -> complex:
    return mu / kw - G_o * G_w / (kw * gm)


def _optical_coefficients(device: DeviceParams, mu: complex, w: float):
    """Coefficients of ``c_o^(out,1)(w)`` at optical frequency ``w``; returns (A..E, psi, chi)."""
    G_o, G_w = device.G_o, device.G_w
    ko = _denominator(device.kappa_o, w)
    kw = _denominator(device.kappa_w, w)
    gm = _denominator(device.gamma_M, w)
    two_gamma = math.sqrt(2.0 * device.gamma_M)
    s_o1 = math.sqrt(2.0 * device.kappa_o1)
    s_o2 = math.sqrt(2.0 * device.kappa_o2)
    s_w1 = math.sqrt(2.0 * device.kappa_w1)
    s_w2 = math.sqrt(2.0 * device.kappa_w2)

    psi = _psi(G_w, kw, gm)
    # 1 - |G_o|^2/(ko gm) - G_o G_w psi Phi^*(-w)/(ko gm), with 1 - psi |G_w|^2/(kw gm) = psi
    # substituted so the two O(Gamma_o) terms no longer cancel near the stability edge.
    bracket = 1.0 - psi * G_o * (np.conj(G_o) * kw + G_w * np.conj(mu)) / (ko * kw * gm)
    chi = s_o1 / bracket

    A = -1j * G_o * two_gamma * psi * chi / (ko * gm)
    B = G_o * G_w * s_w1 / (ko * kw * gm) * chi * psi
    C = G_o * G_w * s_w2 / (ko * kw * gm) * chi * psi
    D = s_o1 / ko * chi - 1.0
    E = s_o2 / ko * chi
    return A, B, C, D, E, psi, chi


def coefficients(
    device: DeviceParams, fb: Optional[FeedbackParams], omega: float
) -> TransferCoefficients:
    """Closed-form output coefficients at microwave-side frequency ``omega``."""
    if fb is not None and device.role != "transmitter":
        raise ParameterError("feedback is only defined for the transmitter")
    mu = feedback_coupling(device, fb)
    G_o, G_w = device.G_o, device.G_w

    # Optical coefficients at -omega enter both rows.
    A, B, C, D, E, _, _ = _optical_coefficients(device, mu, -omega)
    _, _, _, _, _, psi, chi = _optical_coefficients(device, mu, omega)

    kw = _denominator(device.kappa_w, omega)
    gm = _denominator(device.gamma_M, omega)
    Phi = _Phi(mu, G_o, G_w, kw, gm)
    s_o1 = math.sqrt(2.0 * device.kappa_o1)
    s_w1 = math.sqrt(2.0 * device.kappa_w1)
    s_w2 = math.sqrt(2.0 * device.kappa_w2)
    two_gamma = math.sqrt(2.0 * device.gamma_M)
    ratio = math.sqrt(device.kappa_w1 / device.kappa_o1)

    Ap = s_w1 * (np.conj(A) / s_o1 * Phi - 1j * G_w * two_gamma / (kw * gm)) * psi
    Bp = s_w1 * (np.conj(B) / s_o1 * Phi + s_w1 / kw) * psi - 1.0
    Cp = s_w1 * (np.conj(C) / s_o1 * Phi + s_w2 / kw) * psi
    Dp = ratio * (np.conj(D) + 1.0) * Phi * psi
    Ep = ratio * np.conj(E) * Phi * psi

    stable = device_stability(device, fb).stable
    return TransferCoefficients(
        omega=float(omega),
        A=complex(A), B=complex(B), C=complex(C), D=complex(D), E=complex(E),
        Ap=complex(Ap), Bp=complex(Bp), Cp=complex(Cp), Dp=complex(Dp), Ep=complex(Ep),
        psi=complex(psi), chi=complex(chi), Phi=complex(Phi), stable=stable,
    )


def coefficients_oracle(
    device: DeviceParams, fb: Optional[FeedbackParams], omega: float
) -> TransferCoefficients:
    """Same coefficients obtained by directly inverting the 3x3 Fourier-space system.

    With ``x = (c_w(omega), c_o^+(omega), b(omega))`` the Langevin equations read
    ``(-i omega - M) x = K u`` where ``M`` is the drift matrix and ``u`` collects
    the inputs ``(b_in, c_w1, c_w2, c_o1^+, c_o2^+)`` at ``omega``. The outputs
    follow from ``c^(out,1) = sqrt(2 kappa^(1)) c - c^(in,1)``.
    """
    M = drift_matrix(device, fb)
    system = -1j * omega * np.eye(3) - M
    K = np.zeros((3, 5), dtype=complex)
    K[0, 1] = math.sqrt(2.0 * device.kappa_w1)
    K[0, 2] = math.sqrt(2.0 * device.kappa_w2)
    K[1, 3] = math.sqrt(2.0 * device.kappa_o1)
    K[1, 4] = math.sqrt(2.0 * device.kappa_o2)
    K[2, 0] = math.sqrt(2.0 * device.gamma_M)
    try:
        if abs(np.linalg.det(system)) == 0.0:
            raise np.linalg.LinAlgError("singular Fourier-space system")
        X = np.linalg.solve(system, K)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"frequency-domain solve failed at omega={omega!r}: {exc}") from exc

    microwave = math.sqrt(2.0 * device.kappa_w1) * X[0]
    microwave[1] -= 1.0
    # Row of c_o^(out,1)+(omega); the optical coefficients are its conjugate.
    optical_dag = math.sqrt(2.0 * device.kappa_o1) * X[1]
    optical_dag[3] -= 1.0
    optical = np.conj(optical_dag)

    stable = device_stability(device, fb).stable
    A, B, C, D, E = (complex(v) for v in optical)
    Ap, Bp, Cp, Dp, Ep = (complex(v) for v in microwave)
    return TransferCoefficients(
        omega=float(omega), A=A, B=B, C=C, D=D, E=E,
        Ap=Ap, Bp=Bp, Cp=Cp, Dp=Dp, Ep=Ep, stable=stable,
    )
