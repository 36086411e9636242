"""Run-configuration schema (YAML or JSON) and its conversion to parameter records.

Units are carried in key suffixes: ``_hz`` for ordinary frequencies, ``_rad_s``
for angular frequencies and rates, ``_K`` for temperatures, ``_rad`` for
phases. Keys without a suffix are dimensionless. Unknown keys are rejected.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .model import DeviceParams, FeedbackParams, PARAMETER_NAMES, SystemParams, TargetScenario
from .model import gamma_from_quality_factor
from .presets import Axis, Preset
from .sweeps import EvaluationOptions

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """The configuration document does not satisfy the schema."""


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class DeviceSection(_Strict):
    mechanical_frequency_hz: float = Field(gt=0)
    quality_factor: Optional[float] = Field(default=None, gt=0)
    q_convention: Literal["omega_over_Q", "omega_over_2Q"] = "omega_over_Q"
    gamma_M_rad_s: Optional[float] = Field(default=None, gt=0)
    microwave_frequency_hz: float = Field(gt=0)
    optical_frequency_hz: float = Field(default=193.4e12, gt=0)
    kappa_w_over_omega_M: Optional[float] = Field(default=None, gt=0)
    kappa_w_rad_s: Optional[float] = Field(default=None, gt=0)
    kappa_o_over_omega_M: Optional[float] = Field(default=None, gt=0)
    kappa_o_rad_s: Optional[float] = Field(default=None, gt=0)
    temperature_K: float = Field(ge=0)
    Gamma_o: float = Field(ge=0)
    Gamma_w: float = Field(ge=0)
    port1_fraction_w: float = Field(default=0.5, gt=0, le=1)
    port1_fraction_o: float = Field(default=0.5, gt=0, le=1)
    phi_o_rad: float = 0.0
    phi_w_rad: float = 0.0

    @model_validator(mode="after")
    def _one_of(self):
        for a, b in (
            ("quality_factor", "gamma_M_rad_s"),
            ("kappa_w_over_omega_M", "kappa_w_rad_s"),
            ("kappa_o_over_omega_M", "kappa_o_rad_s"),
        ):
            if (getattr(self, a) is None) == (getattr(self, b) is None):
                raise ValueError(f"give exactly one of {a!r} and {b!r}")
        return self

    def to_device(self, role: str) -> DeviceParams:
        omega_M = 2.0 * math.pi * self.mechanical_frequency_hz
        if self.gamma_M_rad_s is not None:
            gamma_M = self.gamma_M_rad_s
        else:
            gamma_M = gamma_from_quality_factor(omega_M, self.quality_factor, self.q_convention)
        kappa_w = self.kappa_w_rad_s or self.kappa_w_over_omega_M * omega_M
        kappa_o = self.kappa_o_rad_s or self.kappa_o_over_omega_M * omega_M
        return DeviceParams(
            role=role,
            omega_M=omega_M,
            gamma_M=gamma_M,
            omega_w=2.0 * math.pi * self.microwave_frequency_hz,
            omega_o=2.0 * math.pi * self.optical_frequency_hz,
            kappa_w=kappa_w,
            kappa_o=kappa_o,
            temperature=self.temperature_K,
            Gamma_o=self.Gamma_o,
            Gamma_w=self.Gamma_w,
            r_w=self.port1_fraction_w,
            r_o=self.port1_fraction_o,
            phi_o=self.phi_o_rad,
            phi_w=self.phi_w_rad,
        )


class FeedbackSection(_Strict):
    g_fb: float = 0.0
    phi_rad: float = 0.0
    eta: float = Field(default=1.0, ge=0, le=1)


class TargetSection(_Strict):
    t: float = Field(default=0.07, ge=0, lt=1)
    N_B: Optional[float] = Field(default=None, ge=0)
    M: int = Field(default=1, ge=1)
    exact: bool = False


class EvaluationSection(_Strict):
    omega_rad_s: Optional[float] = None
    omega_over_kappa_o: Optional[float] = None
    match_phases: bool = True
    cross_terms: bool = True
    rwa_threshold: float = Field(default=0.1, gt=0)
    entanglement: bool = True

    @model_validator(mode="after")
    def _omega(self):
        if self.omega_rad_s is not None and self.omega_over_kappa_o is not None:
            raise ValueError("give at most one of 'omega_rad_s' and 'omega_over_kappa_o'")
        return self

    def options(self) -> EvaluationOptions:
        return EvaluationOptions(
            match_phases=self.match_phases,
            cross_terms=self.cross_terms,
            rwa_threshold=self.rwa_threshold,
            entanglement=self.entanglement,
        )


ParameterName = Literal[PARAMETER_NAMES]  # type: ignore[valid-type]


class AxisSection(_Strict):
    name: ParameterName
    start: float
    stop: float
    num: int = Field(ge=1)

    def to_axis(self) -> Axis:
        return Axis(self.name, self.start, self.stop, self.num)


class SweepSection(_Strict):
    axes: list[AxisSection] = Field(min_length=1, max_length=2)
    both_omega_modes: bool = False

    @model_validator(mode="after")
    def _distinct(self):
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate sweep axes {names}")
        return self


class FreeParameter(_Strict):
    name: ParameterName
    lower: float
    upper: float

    @model_validator(mode="after")
    def _bounds(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower <= self.upper):
            raise ValueError(f"invalid bounds for {self.name!r}")
        return self


class OptimizeSection(_Strict):
    objective: Literal["F", "F_opt", "E_N", "E_N_normalized"] = "F"
    free: list[FreeParameter] = Field(min_length=1)
    grid: int = Field(default=41, ge=1)
    starts: int = Field(default=3, ge=0)
    max_evals: int = Field(default=400, ge=1)
    seed: int = 0


class OutputSection(_Strict):
    path: Optional[str] = None


class RunConfig(_Strict):
    schema_version: Literal[1]
    transmitter: DeviceSection
    receiver: DeviceSection
    feedback: FeedbackSection = FeedbackSection()
    target: TargetSection = TargetSection()
    evaluation: EvaluationSection = EvaluationSection()
    sweep: Optional[SweepSection] = None
    optimize: Optional[OptimizeSection] = None
    output: OutputSection = OutputSection()

    @model_validator(mode="after")
    def _exact_needs_background(self):
        if self.target.exact and self.target.N_B is None:
            raise ValueError("target.exact requires a finite target.N_B")
        return self

    def system(self) -> SystemParams:
        tx = self.transmitter.to_device("transmitter")
        rx = self.receiver.to_device("receiver")
        ev = self.evaluation
        if ev.omega_rad_s is not None:
            omega = ev.omega_rad_s
        else:
            omega = (ev.omega_over_kappa_o or 0.0) * tx.kappa_o
        return SystemParams(
            transmitter=tx,
            receiver=rx,
            feedback=FeedbackParams(g_fb=self.feedback.g_fb, phi=self.feedback.phi_rad, eta=self.feedback.eta),
            target=TargetScenario(
                t=self.target.t, N_B=self.target.N_B, M=self.target.M, exact=self.target.exact
            ),
            omega=omega,
        )


def parse_config(document: Any) -> RunConfig:
    try:
        return RunConfig.model_validate(document)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    """Read a YAML or JSON configuration file and validate it."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    try:
        document = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"configuration {path} is not valid YAML/JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ConfigError(f"configuration {path} must be a mapping at the top level")
    return parse_config(document)


def _device_document(device: DeviceParams) -> dict:
    return {
        "mechanical_frequency_hz": device.omega_M / (2.0 * math.pi),
        "gamma_M_rad_s": device.gamma_M,
        "microwave_frequency_hz": device.omega_w / (2.0 * math.pi),
        "optical_frequency_hz": device.omega_o / (2.0 * math.pi),
        "kappa_w_rad_s": device.kappa_w,
        "kappa_o_rad_s": device.kappa_o,
        "temperature_K": device.temperature,
        "Gamma_o": device.Gamma_o,
        "Gamma_w": device.Gamma_w,
        "port1_fraction_w": device.r_w,
        "port1_fraction_o": device.r_o,
        "phi_o_rad": device.phi_o,
        "phi_w_rad": device.phi_w,
    }


def config_document(system: SystemParams, axes: tuple[Axis, ...] = ()) -> dict:
    """Configuration document that reproduces ``system`` (and optionally a sweep)."""
    target = system.target
    doc = {
        "schema_version": SCHEMA_VERSION,
        "transmitter": _device_document(system.transmitter),
        "receiver": _device_document(system.receiver),
        "feedback": {"g_fb": system.feedback.g_fb, "phi_rad": system.feedback.phi, "eta": system.feedback.eta},
        "target": {"t": target.t, "N_B": target.N_B, "M": target.M, "exact": target.exact},
        "evaluation": {"omega_rad_s": system.omega},
    }
    if axes:
        doc["sweep"] = {
            "axes": [{"name": a.name, "start": a.start, "stop": a.stop, "num": a.num} for a in axes]
        }
    return doc


def preset_document(preset: Preset) -> dict:
    return config_document(preset.system, preset.axes)
