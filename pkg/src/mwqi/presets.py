"""Figure-reproduction presets.

Each preset carries the caption parameters of one published landscape plus the
conventions needed to evaluate it that the captions leave open (detection
frequency for the cooperativity maps, axis ranges, the quality-factor
convention). Conventions are listed separately so the figure metadata can tell
the two kinds of numbers apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .model import (
    DeviceParams,
    FeedbackParams,
    ParameterError,
    SystemParams,
    TargetScenario,
    gamma_from_quality_factor,
)

# Caption values shared by every figure.
MECHANICAL_FREQUENCY_HZ = 10e6
QUALITY_FACTOR = 30e3
TEMPERATURE_K = 0.03
MICROWAVE_FREQUENCY_HZ = 10e9
KAPPA_W_OVER_OMEGA_M = 0.2
KAPPA_O_OVER_OMEGA_M = 0.1
TARGET_REFLECTIVITY = 0.07
Q_CONVENTION = "omega_over_Q"


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    num: int

    def __post_init__(self):
        if self.num < 1:
            raise ParameterError(f"axis {self.name!r} needs at least one point")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ParameterError(f"axis {self.name!r} has non-finite bounds")

    def values(self) -> np.ndarray:
        if self.num == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.num)

    @property
    def step(self) -> float:
        return 0.0 if self.num == 1 else (self.stop - self.start) / (self.num - 1)


@dataclass(frozen=True)
class Preset:
    name: str
    title: str
    system: SystemParams
    axes: tuple[Axis, ...]
    observable: str
    caption: Mapping[str, float] = field(default_factory=dict)
    conventions: Mapping[str, object] = field(default_factory=dict)


def caption_device(
    role: str, Gamma_o: float, Gamma_w: float, port1_fraction: float = 0.5
) -> DeviceParams:
    omega_M = 2.0 * math.pi * MECHANICAL_FREQUENCY_HZ
    return DeviceParams(
        role=role,
        omega_M=omega_M,
        gamma_M=gamma_from_quality_factor(omega_M, QUALITY_FACTOR, Q_CONVENTION),
        omega_w=2.0 * math.pi * MICROWAVE_FREQUENCY_HZ,
        kappa_w=KAPPA_W_OVER_OMEGA_M * omega_M,
        kappa_o=KAPPA_O_OVER_OMEGA_M * omega_M,
        temperature=TEMPERATURE_K,
        Gamma_o=Gamma_o,
        Gamma_w=Gamma_w,
        r_w=port1_fraction,
        r_o=port1_fraction,
    )


def caption_system(
    Gamma_oT: float,
    Gamma_wT: float,
    Gamma_oR: float,
    Gamma_wR: float,
    omega_over_kappa_o: float = 0.0,
    g_fb: float = 0.0,
    phi: float = 0.0,
    eta: float = 1.0,
    port1_fraction: float = 0.5,
) -> SystemParams:
    tx = caption_device("transmitter", Gamma_oT, Gamma_wT, port1_fraction)
    rx = caption_device("receiver", Gamma_oR, Gamma_wR, port1_fraction)
    return SystemParams(
        transmitter=tx,
        receiver=rx,
        feedback=FeedbackParams(g_fb=g_fb, phi=phi, eta=eta),
        target=TargetScenario(t=TARGET_REFLECTIVITY),
        omega=omega_over_kappa_o * tx.kappa_o,
    )


_COMMON_CAPTION = {
    "mechanical_frequency_hz": MECHANICAL_FREQUENCY_HZ,
    "quality_factor": QUALITY_FACTOR,
    "temperature_K": TEMPERATURE_K,
    "microwave_frequency_hz": MICROWAVE_FREQUENCY_HZ,
    "kappa_w_over_omega_M": KAPPA_W_OVER_OMEGA_M,
    "kappa_o_over_omega_M": KAPPA_O_OVER_OMEGA_M,
    "t": TARGET_REFLECTIVITY,
}
_COMMON_CONVENTIONS = {
    "q_convention": "gamma_M = omega_M / Q",
    "phase_matching": "receiver phi_w chosen so conj(m_T) B_R is real and positive",
    "background": "large-N_B limit (N_B cancels in F)",
}

GRID = 41
OMEGA_RANGE = (-2.5, 2.5)

# fig3 values, reused by the fig8 and fig12 presets.
FIG3 = dict(Gamma_oT=1000.0, Gamma_wT=1440.0, Gamma_oR=995.0, Gamma_wR=1120.0)
FIG3_OMEGA = 1.014
FIG3_G_FB = 0.33
FIG3_PHI = 0.6
FIG5 = dict(Gamma_oT=480.4, Gamma_wT=10000.0, Gamma_oR=200.5, Gamma_wR=553.17)
FIG5_OMEGA_NO_FEEDBACK = 1.8e-4
FIG5_OMEGA_FEEDBACK = 0.473
FIG8 = dict(Gamma_oT=1000.0, Gamma_wT=3403.0, Gamma_oR=995.0, Gamma_wR=1120.0)
FIG8_OMEGA = -0.0033


def _preset(name, title, system, axes, observable, caption, conventions=None) -> Preset:
    return Preset(
        name=name,
        title=title,
        system=system,
        axes=tuple(axes),
        observable=observable,
        caption={**_COMMON_CAPTION, **caption},
        conventions={**_COMMON_CONVENTIONS, **(conventions or {})},
    )


def _build() -> dict[str, Preset]:
    presets = [
        _preset(
            "fig2a",
            "F versus transmitter cooperativities, no feedback",
            caption_system(1000.0, 1440.0, 995.0, 1120.0),
            [Axis("Gamma_oT", 0.0, 3000.0, GRID), Axis("Gamma_wT", 0.0, 3000.0, GRID)],
            "F",
            {"Gamma_oR": 995.0, "Gamma_wR": 1120.0, "g_fb": 0.0, "port1_fraction": 0.5},
            {"omega_over_kappa_o": "0 (detection frequency not stated)", "axis_ranges": "chosen"},
        ),
        _preset(
            "fig2b",
            "F versus receiver cooperativities, no feedback",
            caption_system(1000.0, 1440.0, 995.0, 1120.0),
            [Axis("Gamma_oR", 0.0, 3000.0, GRID), Axis("Gamma_wR", 0.0, 3000.0, GRID)],
            "F",
            {"Gamma_oT": 1000.0, "Gamma_wT": 1440.0, "g_fb": 0.0, "port1_fraction": 0.5},
            {"omega_over_kappa_o": "0 (detection frequency not stated)", "axis_ranges": "chosen"},
        ),
        _preset(
            "fig3a",
            "F versus feedback gain and phase",
            caption_system(**FIG3, omega_over_kappa_o=FIG3_OMEGA),
            [Axis("g_fb", 0.0, 1.0, GRID), Axis("phi", -math.pi, math.pi, GRID)],
            "F",
            {**FIG3, "omega_over_kappa_o": FIG3_OMEGA, "eta": 1.0, "port1_fraction": 0.5},
            {"axis_ranges": "chosen"},
        ),
        _preset(
            "fig3b",
            "F versus feedback gain and frequency",
            caption_system(**FIG3, phi=FIG3_PHI),
            [Axis("g_fb", 0.0, 1.0, GRID), Axis("omega_over_kappa_o", *OMEGA_RANGE, GRID)],
            "F",
            {**FIG3, "phi": FIG3_PHI, "eta": 1.0, "port1_fraction": 0.5},
            {"axis_ranges": "chosen"},
        ),
        _preset(
            "fig3c",
            "F versus feedback phase and frequency",
            caption_system(**FIG3, g_fb=FIG3_G_FB),
            [Axis("phi", -math.pi, math.pi, GRID), Axis("omega_over_kappa_o", *OMEGA_RANGE, GRID)],
            "F",
            {**FIG3, "g_fb": FIG3_G_FB, "eta": 1.0, "port1_fraction": 0.5},
            {"axis_ranges": "chosen"},
        ),
        _preset(
            "fig5a",
            "F versus transmitter cooperativities, asymmetric cavities, no feedback",
            caption_system(**FIG5, omega_over_kappa_o=FIG5_OMEGA_NO_FEEDBACK, port1_fraction=0.9),
            [Axis("Gamma_oT", 0.0, 1000.0, GRID), Axis("Gamma_wT", 0.0, 12000.0, GRID)],
            "F",
            {
                "Gamma_oR": FIG5["Gamma_oR"],
                "Gamma_wR": FIG5["Gamma_wR"],
                "omega_over_kappa_o": FIG5_OMEGA_NO_FEEDBACK,
                "g_fb": 0.0,
                "port1_fraction": 0.9,
            },
            {"axis_ranges": "chosen"},
        ),
        _preset(
            "fig5b",
            "F versus receiver cooperativities, asymmetric cavities, no feedback",
            caption_system(**FIG5, omega_over_kappa_o=FIG5_OMEGA_NO_FEEDBACK, port1_fraction=0.9),
            [Axis("Gamma_oR", 0.0, 1000.0, GRID), Axis("Gamma_wR", 0.0, 2000.0, GRID)],
            "F",
            {
                "Gamma_oT": FIG5["Gamma_oT"],
                "Gamma_wT": FIG5["Gamma_wT"],
                "omega_over_kappa_o": FIG5_OMEGA_NO_FEEDBACK,
                "g_fb": 0.0,
                "port1_fraction": 0.9,
            },
            {"axis_ranges": "chosen"},
        ),
        _preset(
            "fig5c",
            "F versus feedback gain and phase, asymmetric cavities",
            caption_system(**FIG5, omega_over_kappa_o=FIG5_OMEGA_FEEDBACK, port1_fraction=0.9),
            [Axis("g_fb", 0.0, 3.0, GRID), Axis("phi", -math.pi, math.pi, GRID)],
            "F",
            {**FIG5, "omega_over_kappa_o": FIG5_OMEGA_FEEDBACK, "eta": 1.0, "port1_fraction": 0.9},
            {"axis_ranges": "chosen; gain extended to 3 because the optimum sits beyond 1"},
        ),
        _preset(
            "fig8a",
            "Logarithmic negativity versus feedback gain and phase",
            caption_system(**FIG8, omega_over_kappa_o=FIG8_OMEGA),
            [Axis("g_fb", 0.0, 1.0, GRID), Axis("phi", -math.pi, math.pi, GRID)],
            "E_N",
            {**FIG8, "omega_over_kappa_o": FIG8_OMEGA, "eta": 1.0, "port1_fraction": 0.5},
            {"axis_ranges": "chosen", "log_base": "e"},
        ),
        _preset(
            "fig8b",
            "Logarithmic negativity per signal photon versus feedback gain and phase",
            caption_system(**FIG8, omega_over_kappa_o=FIG8_OMEGA),
            [Axis("g_fb", 0.0, 1.0, GRID), Axis("phi", -math.pi, math.pi, GRID)],
            "E_N_normalized",
            {**FIG8, "omega_over_kappa_o": FIG8_OMEGA, "eta": 1.0, "port1_fraction": 0.5},
            {"axis_ranges": "chosen", "log_base": "e"},
        ),
        _preset(
            "fig12",
            "F versus feedback detection efficiency",
            caption_system(**FIG3, omega_over_kappa_o=FIG3_OMEGA, g_fb=FIG3_G_FB, phi=FIG3_PHI),
            [Axis("eta", 0.0, 1.0, 101)],
            "F",
            {**FIG3, "omega_over_kappa_o": FIG3_OMEGA, "port1_fraction": 0.5},
            {
                "g_fb": f"{FIG3_G_FB} (optimum read from the gain/phase landscape)",
                "phi": f"{FIG3_PHI} (optimum read from the gain/phase landscape)",
                "axis_ranges": "full efficiency range",
            },
        ),
    ]
    return {p.name: p for p in presets}


PRESETS: dict[str, Preset] = _build()


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
