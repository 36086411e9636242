import math

import numpy as np
import pytest

from mwqi.model import FeedbackParams, ParameterError
from mwqi.presets import caption_device
from mwqi.transfer import coefficients, coefficients_oracle

from conftest import stable_draws


def _bare(device):
    return device.replace(Gamma_o=0.0, Gamma_w=0.0)


@pytest.mark.parametrize("omega_over_kappa", [0.0, 0.7, -2.0])
def test_bare_cavity_reflection_and_transmission(omega_over_kappa):
    dev = _bare(caption_device("receiver", 0.0, 0.0, port1_fraction=0.3))
    ko = dev.kappa_o
    omega = omega_over_kappa * ko
    c = coefficients(dev, None, omega)
    # Optical coefficients live at -omega.
    w = -omega
    assert c.D == pytest.approx(2 * dev.kappa_o1 / (ko - 1j * w) - 1, abs=1e-14)
    assert c.E == pytest.approx(2 * math.sqrt(dev.kappa_o1 * dev.kappa_o2) / (ko - 1j * w), abs=1e-14)
    assert c.A == c.B == c.C == 0
    kw = dev.kappa_w
    assert c.Bp == pytest.approx(2 * dev.kappa_w1 / (kw - 1j * omega) - 1, abs=1e-14)
    assert c.Ap == c.Dp == c.Ep == 0
    assert c.allclose(coefficients_oracle(dev, None, omega), 1e-13)


def test_bare_cavity_at_zero_frequency():
    dev = _bare(caption_device("receiver", 0.0, 0.0))
    c = coefficients(dev, None, 0.0)
    assert c.E == pytest.approx(2 * math.sqrt(dev.kappa_o1 * dev.kappa_o2) / dev.kappa_o)
    assert c.D == pytest.approx(2 * dev.kappa_o1 / dev.kappa_o - 1)


def test_closed_form_matches_oracle_with_feedback():
    rng = np.random.default_rng(5)
    for dev, fb in stable_draws(1, 200):
        omega = rng.uniform(-5, 5) * dev.kappa_o
        a = coefficients(dev, fb, omega)
        b = coefficients_oracle(dev, fb, omega)
        assert a.allclose(b, 1e-10)


def test_receiver_conversion_phase():
    rx = caption_device("receiver", 995.0, 1120.0).replace(phi_o=0.4, phi_w=-1.1)
    B = coefficients(rx, None, 0.0).B
    assert B != 0
    diff = math.remainder(np.angle(B) - (0.4 - 1.1), math.pi)
    assert abs(diff) < 1e-12


def test_B_and_C_differ_by_port_factor():
    for dev, fb in stable_draws(2, 50):
        c = coefficients(dev, fb, 0.3 * dev.kappa_o)
        if abs(c.C) > 0:
            assert c.B / c.C == pytest.approx(math.sqrt(dev.kappa_w1 / dev.kappa_w2), rel=1e-12)


def test_feedback_enters_only_through_mu(fig3_transmitter):
    omega = 1.014 * fig3_transmitter.kappa_o
    off = coefficients(fig3_transmitter, None, omega)
    zero_gain = coefficients(fig3_transmitter, FeedbackParams(g_fb=0.0, phi=0.6), omega)
    on = coefficients(fig3_transmitter, FeedbackParams(g_fb=0.33, phi=0.6), omega)
    assert zero_gain == off
    assert on.psi == off.psi
    assert on.Phi != off.Phi and on.chi != off.chi


def test_feedback_rejected_on_receiver(fig3_receiver):
    with pytest.raises(ParameterError):
        coefficients(fig3_receiver, FeedbackParams(g_fb=0.1), 0.0)


def test_unstable_point_is_flagged_not_raised():
    dev = caption_device("transmitter", 2500.0, 200.0)
    c = coefficients(dev, None, 0.1 * dev.kappa_o)
    assert not c.stable


def _identities(c):
    microwave = abs(c.Ap) ** 2 + abs(c.Bp) ** 2 + abs(c.Cp) ** 2 - abs(c.Dp) ** 2 - abs(c.Ep) ** 2
    optical = abs(c.D) ** 2 + abs(c.E) ** 2 - abs(c.A) ** 2 - abs(c.B) ** 2 - abs(c.C) ** 2
    return microwave, optical


@pytest.mark.parametrize("role", ["receiver", "transmitter"])
def test_commutator_identities_without_feedback(role):
    rng = np.random.default_rng(9)
    for dev, _ in stable_draws(3, 100, role=role, feedback=False):
        omega = rng.uniform(-5, 5) * dev.kappa_o
        microwave, optical = _identities(coefficients(dev, None, omega))
        assert microwave == pytest.approx(1.0, abs=1e-10)
        assert optical == pytest.approx(1.0, abs=1e-10)
