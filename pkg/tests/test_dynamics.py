import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from mwqi.dynamics import copies_for_time, device_stability, drift_matrix, rwa_validity, stability
from mwqi.model import FeedbackParams, ParameterError
from mwqi.presets import caption_device

from conftest import random_device, random_feedback


def test_decoupled_drift_is_diagonal():
    dev = caption_device("transmitter", 0.0, 0.0)
    M = drift_matrix(dev, FeedbackParams())
    np.testing.assert_allclose(M, np.diag([-dev.kappa_w, -dev.kappa_o, -dev.gamma_M]))
    s = stability(M)
    assert s.stable
    assert s.min_decay == pytest.approx(min(dev.kappa_w, dev.kappa_o, dev.gamma_M))


def test_receiver_has_no_feedback_entry():
    rx = caption_device("receiver", 995.0, 1120.0)
    assert drift_matrix(rx)[0, 1] == 0
    with pytest.raises(ParameterError):
        drift_matrix(rx, FeedbackParams(g_fb=0.1))


def test_feedback_coupling_magnitude(fig3_transmitter):
    M = drift_matrix(fig3_transmitter, FeedbackParams(g_fb=0.33, phi=0.6))
    kw, ko = fig3_transmitter.kappa_w, fig3_transmitter.kappa_o
    assert abs(M[0, 1]) == pytest.approx(0.33 * math.sqrt(2 * ko * kw) / 2)
    assert np.angle(M[0, 1]) == pytest.approx(0.6)


def test_fig3_point_is_stable_with_decay_order(fig3_transmitter):
    s = device_stability(fig3_transmitter, FeedbackParams(g_fb=0.33, phi=0.6))
    assert s.stable
    assert 1e4 <= s.min_decay <= 1e6


def test_unstable_corner_of_cooperativity_map():
    # Without feedback det(M) vanishes on Gamma_o = Gamma_w + 1: large Gamma_o, small Gamma_w is unstable.
    assert not device_stability(caption_device("transmitter", 2500.0, 200.0), FeedbackParams()).stable
    assert device_stability(caption_device("transmitter", 200.0, 2500.0), FeedbackParams()).stable


@pytest.mark.parametrize(
    "Gamma_o, Gamma_w, threshold, expected_valid",
    [(0.0, 0.0, 0.1, True), (1000.0, 0.0, 0.1, True), (1000.0, 0.0, 0.05, False)],
)
def test_rwa_margin(Gamma_o, Gamma_w, threshold, expected_valid):
    dev = caption_device("transmitter", Gamma_o, Gamma_w)
    v = rwa_validity(dev, FeedbackParams(), threshold)
    assert v.margin == pytest.approx(math.sqrt(Gamma_o * dev.gamma_M * dev.kappa_o) / dev.omega_M)
    assert v.valid is expected_valid
    if Gamma_o == 1000.0:
        assert v.margin == pytest.approx(math.sqrt(1000 * 0.1 / 3e4))


def test_rwa_invalid_at_large_margin():
    dev = caption_device("transmitter", 0.0, 0.0)
    # margin = 0.5 through the feedback coupling alone.
    g = 0.5 * dev.omega_M / math.sqrt(2 * dev.kappa_o2 * dev.kappa_w2)
    v = rwa_validity(dev, FeedbackParams(g_fb=g))
    assert v.margin == pytest.approx(0.5)
    assert not v.valid


@pytest.mark.parametrize(
    "rate, duration, expected",
    [(2 * math.pi * 1e4, 1.0, 10_000), (2 * math.pi * 1e4, 1e-12, 0), (2 * math.pi * 1e4, 2.0, 20_000)],
)
def test_copies_for_time(rate, duration, expected):
    assert copies_for_time(rate, duration) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-math.pi, math.pi))
def test_stability_invariant_under_global_phase(seed, theta):
    rng = np.random.default_rng(seed)
    dev = random_device(rng, "transmitter")
    fb = random_feedback(rng)
    rotated = dev.replace(phi_o=dev.phi_o + theta, phi_w=dev.phi_w + theta)
    a = device_stability(dev, fb)
    b = device_stability(rotated, fb)
    # Rotating both couplings is undone by a diagonal unitary when mu = 0; with mu the
    # feedback phase must rotate too.
    rotated_fb = fb.replace(phi=fb.phi + 2 * theta) if fb.g_fb else fb
    c = device_stability(rotated, rotated_fb)
    np.testing.assert_allclose(np.sort_complex(a.eigenvalues), np.sort_complex(c.eigenvalues), atol=1e-6 * dev.kappa_w)
    if fb.g_fb == 0:
        assert a.stable == b.stable


def test_no_feedback_real_couplings_against_generic_solver():
    rng = np.random.default_rng(3)
    for _ in range(50):
        dev = random_device(rng, "receiver").replace(phi_o=0.0, phi_w=0.0)
        M = drift_matrix(dev)
        lam = np.linalg.eigvals(M)
        # Characteristic polynomial from the 3x3 structure.
        kw, ko, gm = dev.kappa_w, dev.kappa_o, dev.gamma_M
        Gw2, Go2 = abs(dev.G_w) ** 2, abs(dev.G_o) ** 2
        poly = np.poly1d([1, kw + ko + gm, kw * ko + kw * gm + ko * gm + Gw2 - Go2, kw * ko * gm + ko * Gw2 - kw * Go2])
        np.testing.assert_allclose(np.abs(poly(lam)), 0, atol=1e-8 * (kw + ko + gm) ** 3)


def test_stability_agrees_with_time_domain_integration():
    """Long-time boundedness of dx/dt = M x against the eigenvalue classification."""
    rng = np.random.default_rng(2024)
    checked = {True: 0, False: 0}
    while sum(checked.values()) < 20:
        dev = random_device(rng, "transmitter")
        fb = random_feedback(rng)
        s = device_stability(dev, fb)
        # Keep clear of the marginal boundary so a finite horizon decides.
        if abs(s.min_decay) < 0.02 * dev.gamma_M or checked[s.stable] >= 10:
            continue
        M = drift_matrix(dev, fb)
        horizon = 40.0 / abs(s.min_decay)
        x0 = np.array([1.0, 1.0, 1.0], dtype=complex)
        # Exact propagator of the linear ODE, by scaling and squaring (no eigendecomposition).
        grew = np.linalg.norm(expm(M * horizon) @ x0) > 1e3
        assert grew == (not s.stable)
        checked[s.stable] += 1
