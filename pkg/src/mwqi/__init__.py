"""Feedback-enhanced microwave quantum illumination with electro-optomechanical transducers."""

from .dynamics import copies_for_time, device_stability, drift_matrix, rwa_validity, stability
from .entanglement import log_negativity, normalized_log_negativity
from .illumination import (
    IlluminationReport,
    InstabilityError,
    cascade_moments,
    classical_snr,
    detection_stats,
    ratio_F,
    snr_large_nb,
)
from .model import (
    DeviceParams,
    FeedbackParams,
    SystemParams,
    TargetScenario,
    coupling,
    feedback_thermal_occupation,
    receiver_phase_matching,
    thermal_occupation,
)
from .optimize import Bound, OptimizationSpec, maximize
from .spectra import SpectralMoments, device_moments, input_covariance, output_moments
from .transfer import TransferCoefficients, coefficients, coefficients_oracle

__all__ = [
    "Bound",
    "DeviceParams",
    "FeedbackParams",
    "IlluminationReport",
    "InstabilityError",
    "OptimizationSpec",
    "SpectralMoments",
    "SystemParams",
    "TargetScenario",
    "TransferCoefficients",
    "cascade_moments",
    "classical_snr",
    "coefficients",
    "coefficients_oracle",
    "copies_for_time",
    "coupling",
    "detection_stats",
    "device_moments",
    "device_stability",
    "drift_matrix",
    "feedback_thermal_occupation",
    "input_covariance",
    "log_negativity",
    "maximize",
    "normalized_log_negativity",
    "output_moments",
    "ratio_F",
    "receiver_phase_matching",
    "rwa_validity",
    "snr_large_nb",
    "stability",
    "thermal_occupation",
]
