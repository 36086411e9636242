"""Parameter records and derived quantities for the two electro-optomechanical devices.

All rates are amplitude decay rates in rad/s. The microwave cavity is driven on
the red mechanical sideband and the optical cavity on the blue one, so the
detunings are fixed to ``Delta_w = -Delta_o = omega_M`` and are not stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Optional

import numpy as np
from scipy import constants

Role = Literal["transmitter", "receiver"]

TWO_PI = 2.0 * math.pi


class ParameterError(ValueError):
    """Raised when a parameter record violates its invariants."""


class DegenerateInputError(ValueError):
    """Raised when a quantity needed to fix a phase vanishes."""


def wrap_phase(phase: float) -> float:
    """Reduce an angle to the interval (-pi, pi]."""
    wrapped = math.remainder(phase, TWO_PI)
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(hbar omega / k_B T) - 1)``.

    ``omega`` is an angular frequency in rad/s, ``T`` a temperature in kelvin.
    """
    if not omega > 0:
        raise ParameterError(f"angular frequency must be positive, got {omega!r}")
    if T < 0:
        raise ParameterError(f"temperature must be non-negative, got {T!r}")
    if T == 0:
        return 0.0
    x = constants.hbar * omega / (constants.k * T)
    if x > 700.0:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


Q_CONVENTIONS = {"omega_over_Q": 1.0, "omega_over_2Q": 2.0}


def gamma_from_quality_factor(omega_M: float, Q: float, convention: str = "omega_over_Q") -> float:
    """Mechanical amplitude damping rate for quality factor ``Q``."""
    if convention not in Q_CONVENTIONS:
        raise ParameterError(f"unknown Q convention {convention!r}; expected one of {sorted(Q_CONVENTIONS)}")
    if not Q > 0:
        raise ParameterError(f"quality factor must be positive, got {Q!r}")
    return omega_M / (Q_CONVENTIONS[convention] * Q)


@dataclass(frozen=True)
class DeviceParams:
    """One EOM device (transmitter or receiver).

    ``Gamma_o`` and ``Gamma_w`` are cooperativities ``|G|^2 / (gamma_M kappa)``;
    ``phi_o``, ``phi_w`` are the phases of the corresponding linearized
    couplings. ``r_w``, ``r_o`` are the port-1 fractions ``kappa^(1) / kappa``.
    """

    role: Role
    omega_M: float
    gamma_M: float
    omega_w: float
    kappa_w: float
    kappa_o: float
    temperature: float
    Gamma_o: float
    Gamma_w: float
    omega_o: float = TWO_PI * 193.4e12
    r_w: float = 0.5
    r_o: float = 0.5
    phi_o: float = 0.0
    phi_w: float = 0.0
    # Optical bath occupation is negligible; switch off only for testing.
    zero_optical_occupation: bool = True

    def __post_init__(self):
        if self.role not in ("transmitter", "receiver"):
            raise ParameterError(f"unknown device role {self.role!r}")
        for name in ("omega_M", "gamma_M", "omega_w", "omega_o", "kappa_w", "kappa_o"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be a positive finite rate, got {value!r}")
        for name in ("r_w", "r_o"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ParameterError(f"{name} must lie in (0, 1], got {value!r}")
        for name in ("Gamma_o", "Gamma_w"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value >= 0):
                raise ParameterError(f"{name} must be a non-negative cooperativity, got {value!r}")
        if not self.temperature >= 0:
            raise ParameterError(f"temperature must be non-negative, got {self.temperature!r}")

    @classmethod
    def from_quality_factor(
        cls, *, omega_M: float, Q: float, convention: str = "omega_over_Q", **kwargs
    ) -> "DeviceParams":
        """Build a device from a mechanical quality factor.

        ``convention`` selects ``gamma_M = omega_M / Q`` (``"omega_over_Q"``, the
        default) or ``gamma_M = omega_M / (2 Q)`` (``"omega_over_2Q"``). Pass
        ``gamma_M`` to the constructor directly to bypass the choice.
        """
        if not Q > 0:
            raise ParameterError(f"quality factor must be positive, got {Q!r}")
        return cls(omega_M=omega_M, gamma_M=gamma_from_quality_factor(omega_M, Q, convention), **kwargs)

    def replace(self, **changes) -> "DeviceParams":
        return replace(self, **changes)

    # Port-resolved decay rates.
    @property
    def kappa_w1(self) -> float:
        return self.r_w * self.kappa_w

    @property
    def kappa_w2(self) -> float:
        return (1.0 - self.r_w) * self.kappa_w

    @property
    def kappa_o1(self) -> float:
        return self.r_o * self.kappa_o

    @property
    def kappa_o2(self) -> float:
        return (1.0 - self.r_o) * self.kappa_o

    @property
    def G_w(self) -> complex:
        return coupling(self, "w")

    @property
    def G_o(self) -> complex:
        return coupling(self, "o")

    @property
    def n_mechanical(self) -> float:
        return thermal_occupation(self.omega_M, self.temperature)

    @property
    def n_microwave(self) -> float:
        return thermal_occupation(self.omega_w, self.temperature)

    @property
    def n_optical(self) -> float:
        if self.zero_optical_occupation:
            return 0.0
        return thermal_occupation(self.omega_o, self.temperature)


@dataclass(frozen=True)
class FeedbackParams:
    """Homodyne feedback from the transmitter's second optical output to its second microwave input.

    ``phi`` is the effective feedback phase (homodyne phase minus the delay-induced
    phase); it is stored reduced to (-pi, pi].
    """

    g_fb: float = 0.0
    phi: float = 0.0
    eta: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.g_fb):
            raise ParameterError(f"feedback gain must be finite, got {self.g_fb!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError(f"detection efficiency must lie in [0, 1], got {self.eta!r}")
        if not np.isfinite(self.phi):
            raise ParameterError(f"feedback phase must be finite, got {self.phi!r}")
        object.__setattr__(self, "phi", wrap_phase(float(self.phi)))

    def replace(self, **changes) -> "FeedbackParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class TargetScenario:
    """Target reflectivity ``t``, background photons ``N_B`` and number of copies ``M``.

    ``N_B=None`` selects the large-background limit, in which only ratios that
    are independent of ``N_B`` are reported. ``exact=True`` evaluates the full
    finite-``N_B`` detection statistics instead of the large-``N_B`` expression.
    """

    t: float = 0.07
    N_B: Optional[float] = None
    M: int = 1
    exact: bool = False

    def __post_init__(self):
        if not 0.0 <= self.t < 1.0:
            raise ParameterError(f"reflectivity must lie in [0, 1), got {self.t!r}")
        if self.N_B is not None and not (np.isfinite(self.N_B) and self.N_B >= 0):
            raise ParameterError(f"background photon number must be >= 0, got {self.N_B!r}")
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 1:
            raise ParameterError(f"number of copies must be an integer >= 1, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        if self.exact and self.N_B is None:
            raise ParameterError("exact detection statistics require a finite N_B")

    @property
    def large_background(self) -> bool:
        return self.N_B is None

    def replace(self, **changes) -> "TargetScenario":
        return replace(self, **changes)


def coupling(device: DeviceParams, mode: str) -> complex:
    """Linearized coupling ``G = sqrt(Gamma gamma_M kappa) exp(i phi)`` of mode ``'w'`` or ``'o'``."""
    if mode == "w":
        Gamma, kappa, phase = device.Gamma_w, device.kappa_w, device.phi_w
    elif mode == "o":
        Gamma, kappa, phase = device.Gamma_o, device.kappa_o, device.phi_o
    else:
        raise ValueError(f"mode must be 'w' or 'o', got {mode!r}")
    magnitude = math.sqrt(Gamma * device.gamma_M * kappa)
    if magnitude == 0.0:
        return 0j
    return magnitude * complex(math.cos(phase), math.sin(phase))


def feedback_coupling(device: DeviceParams, fb: Optional[FeedbackParams]) -> complex:
    """Effective optical-to-microwave coupling created by the feedback loop (zero without feedback)."""
    if fb is None:
        return 0j
    if device.role != "transmitter":
        raise ParameterError("feedback acts on the transmitter only")
    magnitude = fb.g_fb * math.sqrt(2.0 * fb.eta * device.kappa_o2 * device.kappa_w2)
    return magnitude * complex(math.cos(fb.phi), math.sin(fb.phi))


def feedback_thermal_occupation(device: DeviceParams, fb: FeedbackParams) -> float:
    """Occupation of the transmitter's total microwave input with feedback noise included."""
    if device.role != "transmitter":
        raise ParameterError("feedback acts on the transmitter only")
    return device.n_microwave + fb.g_fb**2 * device.kappa_w2 / (2.0 * device.kappa_w)


def receiver_phase_matching(m_T: complex, B_R: complex, receiver: DeviceParams) -> DeviceParams:
    """Shift the receiver drive phases so that ``conj(m_T) * B_R`` becomes real and positive.

    ``B_R`` must be the receiver's conversion coefficient evaluated at the
    receiver's current phases. The conversion coefficient is proportional to
    ``G_o G_w`` of the receiver, so the whole correction is applied to ``phi_w``.
    """
    if receiver.role != "receiver":
        raise ParameterError("phase matching adjusts the receiver")
    product = complex(np.conj(m_T) * B_R)
    scale = max(abs(m_T) * abs(B_R), 1e-300)
    if abs(m_T) == 0.0 or abs(B_R) == 0.0 or abs(product) <= 1e-15 * scale:
        raise DegenerateInputError("phase matching undefined: m_T or B_R vanishes")
    correction = -math.atan2(product.imag, product.real)
    if correction == 0.0:
        return receiver
    return receiver.replace(phi_w=wrap_phase(receiver.phi_w + correction))


@dataclass(frozen=True)
class SystemParams:
    """A full parameter point: both devices, feedback, target and the detection frequency.

    ``omega`` is the microwave-side detection frequency in rad/s (the optical
    idler and the converted signal are taken at ``-omega``).
    """

    transmitter: DeviceParams
    receiver: DeviceParams
    feedback: FeedbackParams = field(default_factory=FeedbackParams)
    target: TargetScenario = field(default_factory=TargetScenario)
    omega: float = 0.0

    def __post_init__(self):
        if self.transmitter.role != "transmitter":
            raise ParameterError("transmitter record must have role 'transmitter'")
        if self.receiver.role != "receiver":
            raise ParameterError("receiver record must have role 'receiver'")
        if not np.isfinite(self.omega):
            raise ParameterError("detection frequency must be finite")

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def with_param(self, name: str, value: float) -> "SystemParams":
        """Return a copy with one named scalar parameter changed (see ``PARAMETER_NAMES``)."""
        tx, rx, fb = self.transmitter, self.receiver, self.feedback
        if name == "g_fb":
            return self.replace(feedback=fb.replace(g_fb=value))
        if name == "phi":
            return self.replace(feedback=fb.replace(phi=value))
        if name == "eta":
            return self.replace(feedback=fb.replace(eta=value))
        if name == "omega":
            return self.replace(omega=value)
        if name == "omega_over_kappa_o":
            return self.replace(omega=value * tx.kappa_o)
        if name == "t":
            return self.replace(target=self.target.replace(t=value))
        if name == "Gamma_oT":
            return self.replace(transmitter=tx.replace(Gamma_o=value))
        if name == "Gamma_wT":
            return self.replace(transmitter=tx.replace(Gamma_w=value))
        if name == "Gamma_oR":
            return self.replace(receiver=rx.replace(Gamma_o=value))
        if name == "Gamma_wR":
            return self.replace(receiver=rx.replace(Gamma_w=value))
        raise KeyError(f"unknown parameter {name!r}; expected one of {PARAMETER_NAMES}")

    def get_param(self, name: str) -> float:
        lookup = {
            "g_fb": lambda: self.feedback.g_fb,
            "phi": lambda: self.feedback.phi,
            "eta": lambda: self.feedback.eta,
            "omega": lambda: self.omega,
            "omega_over_kappa_o": lambda: self.omega / self.transmitter.kappa_o,
            "t": lambda: self.target.t,
            "Gamma_oT": lambda: self.transmitter.Gamma_o,
            "Gamma_wT": lambda: self.transmitter.Gamma_w,
            "Gamma_oR": lambda: self.receiver.Gamma_o,
            "Gamma_wR": lambda: self.receiver.Gamma_w,
        }
        if name not in lookup:
            raise KeyError(f"unknown parameter {name!r}; expected one of {PARAMETER_NAMES}")
        return float(lookup[name]())


PARAMETER_NAMES = (
    "g_fb",
    "phi",
    "eta",
    "omega",
    "omega_over_kappa_o",
    "t",
    "Gamma_oT",
    "Gamma_wT",
    "Gamma_oR",
    "Gamma_wR",
)
