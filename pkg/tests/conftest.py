import math

import numpy as np
import pytest

from mwqi.dynamics import device_stability
from mwqi.model import DeviceParams, FeedbackParams
from mwqi.presets import caption_device, caption_system

OMEGA_M = 2.0 * math.pi * 10e6


def random_device(rng: np.random.Generator, role: str) -> DeviceParams:
    return DeviceParams(
        role=role,
        omega_M=OMEGA_M,
        gamma_M=OMEGA_M / 10 ** rng.uniform(3, 5),
        omega_w=2.0 * math.pi * 10e9,
        kappa_w=OMEGA_M * rng.uniform(0.05, 0.5),
        kappa_o=OMEGA_M * rng.uniform(0.05, 0.5),
        temperature=rng.uniform(0.0, 0.1),
        Gamma_o=rng.uniform(0, 2000),
        Gamma_w=rng.uniform(0, 3000),
        r_w=rng.uniform(0.1, 1.0),
        r_o=rng.uniform(0.1, 1.0),
        phi_o=rng.uniform(-math.pi, math.pi),
        phi_w=rng.uniform(-math.pi, math.pi),
    )


def random_feedback(rng: np.random.Generator) -> FeedbackParams:
    return FeedbackParams(
        g_fb=rng.uniform(0, 1), phi=rng.uniform(-math.pi, math.pi), eta=rng.uniform(0, 1)
    )


def stable_draws(seed: int, count: int, role: str = "transmitter", feedback: bool = True):
    """``count`` random (device, feedback) pairs whose drift matrix is stable."""
    rng = np.random.default_rng(seed)
    draws = []
    while len(draws) < count:
        device = random_device(rng, role)
        fb = random_feedback(rng) if (feedback and role == "transmitter") else None
        if device_stability(device, fb).stable:
            draws.append((device, fb))
    return draws


@pytest.fixture
def fig3_transmitter():
    return caption_device("transmitter", 1000.0, 1440.0)


@pytest.fixture
def fig3_receiver():
    return caption_device("receiver", 995.0, 1120.0)


@pytest.fixture
def fig3_optimum():
    return caption_system(1000.0, 1440.0, 995.0, 1120.0, omega_over_kappa_o=1.014, g_fb=0.33, phi=0.6)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
