import math
import warnings

import numpy as np
import pytest

from mwqi.dynamics import drift_matrix
from mwqi.model import FeedbackParams, feedback_thermal_occupation
from mwqi.presets import caption_device
from mwqi.spectra import (
    PhysicalityWarning,
    SpectralMoments,
    device_moments,
    input_covariance,
    output_moments,
)
from mwqi.transfer import coefficients

from conftest import stable_draws


def presplit_moments(device, fb, omega):
    """Moments from the feedback loop written before the effective-input split.

    The loop feeds the homodyned second optical output back into the second
    microwave port,

        f = c2 + g sqrt(eta/2) e^{i phi} c_o^(out,2)+ + g sqrt(1-eta) X - g sqrt(eta/2) e^{-i phi} z,

    with ``c_o^(out,2)+ = sqrt(2 k_o2) c_o+ - c_o2+``. All seven inputs are
    uncorrelated, so the moments are sums over inputs of products of coefficients.
    """
    g, eta, phi = fb.g_fb, fb.eta, fb.phi
    M0 = drift_matrix(device, None)
    # Inputs: b, c1, c2, c_o1+, c_o2+, X, z
    K = np.zeros((3, 7), dtype=complex)
    f = np.zeros(7, dtype=complex)
    f_state = np.zeros(3, dtype=complex)
    w = g * math.sqrt(eta / 2)
    f[2] = 1.0
    f[4] = -w * np.exp(1j * phi)
    f[5] = g * math.sqrt(1 - eta)
    f[6] = -w * np.exp(-1j * phi)
    f_state[1] = w * np.exp(1j * phi) * math.sqrt(2 * device.kappa_o2)
    K[0, 1] = math.sqrt(2 * device.kappa_w1)
    K[0] += math.sqrt(2 * device.kappa_w2) * f
    K[1, 3] = math.sqrt(2 * device.kappa_o1)
    K[1, 4] = math.sqrt(2 * device.kappa_o2)
    K[2, 0] = math.sqrt(2 * device.gamma_M)
    M = M0.copy()
    M[0] += math.sqrt(2 * device.kappa_w2) * f_state
    X = np.linalg.solve(-1j * omega * np.eye(3) - M, K)
    alpha = math.sqrt(2 * device.kappa_w1) * X[0]
    alpha[1] -= 1
    gamma = math.sqrt(2 * device.kappa_o1) * X[1]  # row of c_o^(out,1)+
    gamma[3] -= 1
    n_M, n_w, n_o = device.n_mechanical, device.n_microwave, device.n_optical
    normal = np.array([n_M, n_w, n_w, 1 + n_o, 1 + n_o, 0.5, n_o])
    anti = np.array([1 + n_M, 1 + n_w, 1 + n_w, n_o, n_o, 0.5, 1 + n_o])
    return (
        float(np.sum(np.abs(alpha) ** 2 * normal)),
        float(np.sum(np.abs(gamma) ** 2 * anti)),
        complex(np.sum(alpha * np.conj(gamma) * anti)),
    )


def test_assembly_matches_presplit_oracle():
    rng = np.random.default_rng(17)
    for dev, fb in stable_draws(4, 200):
        dev = dev.replace(zero_optical_occupation=bool(rng.integers(2)))
        omega = rng.uniform(-3, 3) * dev.kappa_o
        n_w, n_o, m = presplit_moments(dev, fb, omega)
        mom = device_moments(dev, fb, omega)
        scale = max(n_w, n_o, 1e-12)
        assert mom.n_w == pytest.approx(n_w, rel=1e-9, abs=1e-12 * scale)
        assert mom.n_o == pytest.approx(n_o, rel=1e-9, abs=1e-12 * scale)
        assert abs(mom.m - m) <= 1e-9 * max(abs(m), 1e-12 * scale)


def test_closed_form_moments_match_oracle_moments():
    for dev, fb in stable_draws(5, 100):
        omega = 0.4 * dev.kappa_o
        a = device_moments(dev, fb, omega)
        b = device_moments(dev, fb, omega, oracle=True)
        assert a.n_w == pytest.approx(b.n_w, rel=1e-10)
        assert a.n_o == pytest.approx(b.n_o, rel=1e-10)
        assert abs(a.m - b.m) <= 1e-10 * max(abs(b.m), 1e-300)


def test_no_feedback_covariance_is_thermal(fig3_transmitter):
    cov = input_covariance(fig3_transmitter, FeedbackParams())
    n = fig3_transmitter.n_microwave
    np.testing.assert_allclose(
        cov.normal, np.diag([fig3_transmitter.n_mechanical, n, n, 1.0, 1.0]), atol=1e-15
    )
    assert cov.microwave_occupation == pytest.approx(n, rel=1e-14)


@pytest.mark.parametrize("eta", [0.0, 0.3, 1.0])
@pytest.mark.parametrize("r_w", [0.2, 0.5, 1.0])
def test_feedback_occupation_reproduced(eta, r_w):
    dev = caption_device("transmitter", 1000.0, 1440.0, port1_fraction=r_w)
    fb = FeedbackParams(g_fb=0.33, phi=0.6, eta=eta)
    cov = input_covariance(dev, fb)
    assert cov.microwave_occupation == pytest.approx(feedback_thermal_occupation(dev, fb), rel=1e-12)
    # Both orderings describe the same thermal port: <c c+> = <c+ c> + 1.
    assert cov.anti[2, 2].real == pytest.approx(cov.normal[2, 2].real + 1.0, rel=1e-12)
    if eta == 0.0:
        assert cov.cross_correlation == 0
    elif r_w < 1:
        assert abs(cov.cross_correlation) > 0


def test_cross_terms_off_keeps_occupation():
    dev = caption_device("transmitter", 1000.0, 1440.0)
    fb = FeedbackParams(g_fb=0.5, phi=0.2)
    on = input_covariance(dev, fb, cross_terms=True)
    off = input_covariance(dev, fb, cross_terms=False)
    np.testing.assert_allclose(np.diag(on.normal), np.diag(off.normal))
    assert off.cross_correlation == 0


def test_covariance_positive_semidefinite():
    for dev, fb in stable_draws(6, 50):
        cov = input_covariance(dev, fb)
        for block in (cov.normal, cov.anti):
            assert np.min(np.linalg.eigvalsh(block)) > -1e-12


def test_zero_coupling_moments(fig3_transmitter):
    dev = fig3_transmitter.replace(Gamma_o=0.0, Gamma_w=0.0)
    mom = device_moments(dev, None, 0.2 * dev.kappa_o)
    assert mom.m == 0
    assert mom.n_w == pytest.approx(dev.n_microwave, rel=1e-12)


def test_two_mode_correlations_without_feedback():
    dev = caption_device("transmitter", 1000.0, 1440.0, port1_fraction=1.0)
    assert abs(device_moments(dev, None, 0.0).m) > 0


def test_bound_and_positivity_on_random_points():
    for dev, fb in stable_draws(8, 300):
        with warnings.catch_warnings():
            warnings.simplefilter("error", PhysicalityWarning)
            mom = device_moments(dev, fb, 0.5 * dev.kappa_o)
        assert mom.n_w >= 0 and mom.n_o >= 0
        assert mom.physical_excess <= 1e-8


def test_physicality_warning_on_inconsistent_input(fig3_transmitter):
    c = coefficients(fig3_transmitter, None, 0.0)
    cov = input_covariance(fig3_transmitter)
    # Halving the noise violates the uncertainty bound.
    broken = type(cov)(cov.normal * 0.0, cov.anti * 0.5, cov.mixing, cov.kappa_ratio_port2)
    with pytest.warns(PhysicalityWarning):
        output_moments(c, broken)


def test_output_moments_checks_frequency(fig3_transmitter):
    c = coefficients(fig3_transmitter, None, 0.0)
    with pytest.raises(ValueError):
        output_moments(c, input_covariance(fig3_transmitter), omega=1.0)


def test_n_o_dependence_on_eta():
    # mu scales with sqrt(eta), so n_o does move with the efficiency once the gain is on.
    dev = caption_device("transmitter", 1000.0, 1440.0)
    omega = 1.014 * dev.kappa_o
    values = [device_moments(dev, FeedbackParams(0.33, 0.6, eta), omega).n_o for eta in (1.0, 0.7, 0.3, 0.0)]
    assert values == pytest.approx([0.1188, 0.1210, 0.1249, 0.1329], abs=5e-4)
    flat = {round(device_moments(dev, FeedbackParams(0.0, 0.6, eta), omega).n_o, 14) for eta in (1.0, 0.3)}
    assert len(flat) == 1


def test_moments_continuous_in_frequency(fig3_transmitter):
    fb = FeedbackParams(0.33, 0.6)
    grid = np.linspace(-3, 3, 601) * fig3_transmitter.kappa_o
    n_w = np.array([device_moments(fig3_transmitter, fb, w).n_w for w in grid])
    fine = np.array([device_moments(fig3_transmitter, fb, w).n_w for w in grid[:-1] + 0.5 * np.diff(grid)])
    # Midpoints sit between neighbours up to curvature: no poles inside the stable region.
    assert np.max(np.abs(fine - 0.5 * (n_w[1:] + n_w[:-1]))) < 0.05 * np.max(n_w)
