"""Quantum-illumination detection statistics with the phase-conjugate receiver.

The returned field enters the receiver's first microwave port, the receiver's
first optical output ``r = c_o,R^(out,1)(-omega)`` is mixed with the idler
``i = c_o,T^(out,1)(-omega)`` on a balanced beam splitter and the photocounts are
subtracted. All second moments below are per unit bandwidth.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erfc

from . import entanglement
from .dynamics import device_stability, rwa_validity
from .model import (
    DegenerateInputError,
    DeviceParams,
    FeedbackParams,
    ParameterError,
    SystemParams,
    TargetScenario,
    receiver_phase_matching,
)
from .spectra import SpectralMoments, input_covariance, output_moments
from .transfer import TransferCoefficients, coefficients

# Bound on F for the phase-conjugate receiver; the Helstrom/Chernoff limit would be 4.
PHASE_CONJUGATE_F_BOUND = 2.0
HELSTROM_F_BOUND = 4.0
P_ERR_FLOOR = 1e-300


class InstabilityError(RuntimeError):
    """The linearized dynamics of a device are unstable; stationary spectra do not exist."""


class DetectionError(ZeroDivisionError):
    """Detection statistics are degenerate (zero total standard deviation)."""


@dataclass(frozen=True)
class HypothesisMoments:
    """``<r^+ r>``, ``<i^+ i>`` and ``<r^+ i>`` under one hypothesis."""

    n_r: float
    n_i: float
    c_ri: complex


@dataclass(frozen=True)
class CascadeMoments:
    omega: float
    h0: HypothesisMoments
    h1: HypothesisMoments
    B_R: complex
    tx: SpectralMoments


@dataclass(frozen=True)
class DetectionStats:
    N_H0: float
    N_H1: float
    sigma_H0: float
    sigma_H1: float
    SNR_QI: float
    P_err: float
    p_err_underflow: bool = False


@dataclass(frozen=True)
class IlluminationReport:
    omega: float
    F: Optional[float]
    F_opt: float
    F_max: float
    n_w: float
    n_o: float
    m: complex
    B_R: complex
    phase_matched: bool
    receiver_phi_w: float
    receiver_phi_o: float
    stable: bool
    min_decay: float
    min_decay_transmitter: float
    min_decay_receiver: float
    rwa_margin: float
    rwa_valid: bool
    SNR_QI: Optional[float] = None
    SNR_Cl: Optional[float] = None
    SNR_QI_times_NB: Optional[float] = None
    SNR_Cl_times_NB: Optional[float] = None
    P_err: Optional[float] = None
    p_err_underflow: bool = False
    detection: Optional[DetectionStats] = None
    E_N: Optional[float] = None
    E_N_normalized: Optional[float] = None

    @property
    def abs_m(self) -> float:
        return abs(self.m)

    def as_dict(self) -> dict:
        out = asdict(self)
        detection = out.pop("detection")
        for key in ("m", "B_R"):
            value = out.pop(key)
            out[f"{key}_re"] = value.real
            out[f"{key}_im"] = value.imag
        out["abs_m"] = self.abs_m
        if detection is not None:
            out.update({k: v for k, v in detection.items() if k not in out})
        return out


def _joint_thermal(n: float) -> tuple[float, float]:
    return n, 1.0 + n


def cascade_moments(
    tx: DeviceParams,
    fb: Optional[FeedbackParams],
    rx: DeviceParams,
    scenario: TargetScenario,
    omega: float,
    cross_terms: bool = True,
) -> CascadeMoments:
    """Joint moments of the converted return and the idler under both hypotheses.

    The joint input vector is ``(u_T, c_B, b_R, c_w2_R, c_o1_R^+, c_o2_R^+)`` with
    ``u_T`` the transmitter's effective inputs; transmitter, background and
    receiver baths are mutually independent.
    """
    if scenario.N_B is None:
        raise ParameterError("cascade moments need a finite background photon number")
    for device, feedback in ((tx, fb), (rx, None)):
        if not device_stability(device, feedback).stable:
            raise InstabilityError(f"{device.role} is unstable")
    t = scenario.t
    ct = coefficients(tx, fb, omega)
    cr = coefficients(rx, None, omega)
    cov_t = input_covariance(tx, fb, cross_terms)
    tx_moments = output_moments(ct, cov_t)

    alpha_t = ct.microwave_row
    beta_t = np.conj(ct.optical_row)
    beta_r = np.conj(cr.optical_row)  # coefficients of r^+ over (b, c_w1, c_w2, c_o1^+, c_o2^+)

    receiver_anti = [
        1.0 + rx.n_mechanical,
        1.0 + rx.n_microwave,
        rx.n_optical,
        rx.n_optical,
    ]

    def hypothesis(present: bool) -> HypothesisMoments:
        n_B = scenario.N_B / (1.0 - t) if present else scenario.N_B
        anti = np.zeros((10, 10), dtype=complex)
        anti[:5, :5] = cov_t.anti
        anti[5, 5] = 1.0 + n_B
        anti[6:, 6:] = np.diag(receiver_anti)
        rho = np.zeros(10, dtype=complex)
        if present:
            rho[:5] = math.sqrt(t) * beta_r[1] * alpha_t
            rho[5] = math.sqrt(1.0 - t) * beta_r[1]
        else:
            rho[5] = beta_r[1]
        rho[6], rho[7], rho[8], rho[9] = beta_r[0], beta_r[2], beta_r[3], beta_r[4]
        iota = np.zeros(10, dtype=complex)
        iota[:5] = beta_t
        n_r = float(np.real(rho @ anti @ rho.conj()))
        n_i = float(np.real(iota @ anti @ iota.conj()))
        c_ri = complex(rho @ anti @ iota.conj())
        return HypothesisMoments(n_r, n_i, c_ri)

    return CascadeMoments(
        omega=float(omega), h0=hypothesis(False), h1=hypothesis(True), B_R=cr.B, tx=tx_moments
    )


def _sigma(h: HypothesisMoments) -> float:
    # Counting statistics exactly as derived for the balanced photocount difference.
    n_plus = 0.5 * (h.n_r + h.n_i + 2.0 * h.c_ri.real)
    n_minus = 0.5 * (h.n_r + h.n_i - 2.0 * h.c_ri.real)
    variance = (
        n_plus * (n_plus + 1.0)
        + n_minus * (n_minus + 1.0)
        - 0.5 * (h.n_r - h.n_i) ** 2
        + 2.0 * h.c_ri.imag**2
    )
    return math.sqrt(max(variance, 0.0))


def error_probability(snr: float) -> tuple[float, bool]:
    """``P_err = erfc(sqrt(SNR / 8)) / 2``; values below 1e-300 are clamped to 0 (flag True)."""
    p = 0.5 * float(erfc(math.sqrt(max(snr, 0.0) / 8.0)))
    if p < P_ERR_FLOOR:
        return 0.0, True
    return p, False


def detection_stats(cascade: CascadeMoments, M: int) -> DetectionStats:
    N_H0 = 2.0 * cascade.h0.c_ri.real
    N_H1 = 2.0 * cascade.h1.c_ri.real
    sigma_H0 = _sigma(cascade.h0)
    sigma_H1 = _sigma(cascade.h1)
    total = sigma_H0 + sigma_H1
    if total == 0.0:
        raise DetectionError("zero standard deviation under both hypotheses")
    snr = 4.0 * M * ((N_H1 - N_H0) / total) ** 2
    p_err, underflow = error_probability(snr)
    return DetectionStats(N_H0, N_H1, sigma_H0, sigma_H1, snr, p_err, underflow)


def snr_large_nb(
    tx_moments: SpectralMoments, B_R: complex, scenario: TargetScenario, M: Optional[int] = None
) -> float:
    """Large-background SNR; with ``N_B=None`` the ``N_B``-independent product ``SNR * N_B``."""
    if B_R == 0:
        raise ZeroDivisionError("conversion coefficient B_R vanishes")
    M = scenario.M if M is None else M
    overlap = (B_R * np.conj(tx_moments.m)).real
    prefactor = 4.0 * M * scenario.t * overlap**2 / (abs(B_R) ** 2 * (1.0 + 2.0 * tx_moments.n_o))
    if scenario.N_B is None:
        return float(prefactor)
    return float(prefactor / scenario.N_B)


def classical_snr(n_w: float, scenario: TargetScenario, M: Optional[int] = None) -> float:
    """Coherent-state homodyne benchmark; with ``N_B=None`` its large-``N_B`` product ``SNR * N_B``."""
    if n_w < 0:
        raise ValueError("photon number must be non-negative")
    M = scenario.M if M is None else M
    if scenario.N_B is None:
        return 2.0 * M * scenario.t * n_w
    return 4.0 * M * scenario.t * n_w / (2.0 * (scenario.N_B + 1.0))


def optimal_ratio(moments: SpectralMoments) -> float:
    """F at perfect phase matching in the large-background limit."""
    return 2.0 * abs(moments.m) ** 2 / (moments.n_w * (1.0 + 2.0 * moments.n_o))


def maximal_ratio(moments: SpectralMoments) -> float:
    return 1.0 + 1.0 / (1.0 + 2.0 * moments.n_o)


def matched_receiver(
    tx: DeviceParams, fb: Optional[FeedbackParams], rx: DeviceParams, omega: float, cross_terms: bool = True
) -> DeviceParams:
    """Receiver with drive phases chosen so that ``conj(m_T) B_R`` is real and positive."""
    tx_moments = output_moments(coefficients(tx, fb, omega), input_covariance(tx, fb, cross_terms))
    return receiver_phase_matching(tx_moments.m, coefficients(rx, None, omega).B, rx)


def ratio_F(
    system: SystemParams,
    match_phases: bool = True,
    cross_terms: bool = True,
    with_entanglement: bool = True,
    rwa_threshold: float = 0.1,
) -> IlluminationReport:
    """Evaluate F, F_opt, F_max and the detection statistics at one parameter point.

    By default F is the large-background ratio, in which ``N_B`` cancels. With
    ``system.target.exact`` the full finite-``N_B`` counting statistics are used.
    """
    tx, rx, fb = system.transmitter, system.receiver, system.feedback
    omega, scenario = system.omega, system.target
    st = device_stability(tx, fb)
    sr = device_stability(rx, None)
    if not (st.stable and sr.stable):
        unstable = [d.role for d, s in ((tx, st), (rx, sr)) if not s.stable]
        raise InstabilityError(f"unstable device(s): {', '.join(unstable)}")

    tx_moments = output_moments(coefficients(tx, fb, omega), input_covariance(tx, fb, cross_terms))
    B_R = coefficients(rx, None, omega).B
    phase_matched = False
    if match_phases and tx_moments.m != 0 and B_R != 0:
        try:
            rx = receiver_phase_matching(tx_moments.m, B_R, rx)
            phase_matched = True
        except DegenerateInputError:
            pass
        B_R = coefficients(rx, None, omega).B

    if tx_moments.n_w <= 0:
        raise DetectionError("transmitter emits no signal photons")
    F_opt = optimal_ratio(tx_moments)
    F_max = maximal_ratio(tx_moments)
    large = TargetScenario(t=scenario.t if scenario.t > 0 else 0.5, N_B=None, M=1)
    # B_R = 0: nothing is converted, so the quantum scheme has no signal.
    large_snr = snr_large_nb(tx_moments, B_R, large, 1) if B_R != 0 else 0.0
    F_large = large_snr / classical_snr(tx_moments.n_w, large, 1)

    v_t = rwa_validity(tx, fb, rwa_threshold)
    v_r = rwa_validity(rx, None, rwa_threshold)
    kwargs = dict(
        omega=float(omega),
        F_opt=F_opt,
        F_max=F_max,
        n_w=tx_moments.n_w,
        n_o=tx_moments.n_o,
        m=tx_moments.m,
        B_R=complex(B_R),
        phase_matched=phase_matched,
        receiver_phi_w=rx.phi_w,
        receiver_phi_o=rx.phi_o,
        stable=True,
        min_decay=min(st.min_decay, sr.min_decay),
        min_decay_transmitter=st.min_decay,
        min_decay_receiver=sr.min_decay,
        rwa_margin=max(v_t.margin, v_r.margin),
        rwa_valid=v_t.valid and v_r.valid,
    )

    if scenario.N_B is None:
        kwargs.update(
            F=F_large,
            SNR_QI_times_NB=snr_large_nb(tx_moments, B_R, scenario) if B_R != 0 else 0.0,
            SNR_Cl_times_NB=classical_snr(tx_moments.n_w, scenario),
        )
    else:
        snr_cl = classical_snr(tx_moments.n_w, scenario)
        if scenario.exact:
            stats = detection_stats(
                cascade_moments(tx, fb, rx, scenario, omega, cross_terms), scenario.M
            )
            snr_qi = stats.SNR_QI
            kwargs["detection"] = stats
        else:
            snr_qi = snr_large_nb(tx_moments, B_R, scenario) if B_R != 0 else 0.0
        p_err, underflow = error_probability(snr_qi)
        kwargs.update(
            F=(snr_qi / snr_cl) if snr_cl > 0 else None,
            SNR_QI=snr_qi,
            SNR_Cl=snr_cl,
            P_err=p_err,
            p_err_underflow=underflow,
        )

    if with_entanglement:
        e_n = entanglement.log_negativity(tx_moments)
        kwargs.update(E_N=e_n, E_N_normalized=e_n / tx_moments.n_w)
    return IlluminationReport(**kwargs)
