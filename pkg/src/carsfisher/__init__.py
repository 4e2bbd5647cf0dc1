"""Quantum and classical Fisher-information limits for two-emitter
separation estimation in coherent Raman (CARS) imaging.

The public surface is re-exported here; the CLI lives in
:mod:`carsfisher.cli` and is reachable through the ``carsfisher``
console script.
"""

from .excitation import (
    EmitterScene,
    ImageAmplitudes,
    PlaneWaveExcitation,
    VortexExcitation,
    amplitude_derivative_check,
    emission_amplitude,
    image_amplitudes,
)
from .fisher import (
    FisherReport,
    QfiMatrix,
    fi_direct,
    fi_spade,
    intensity_profile,
    mean_photons_spade,
    optimize_waist,
    qfi_matrix,
    qfi_plane_closed,
    qfi_separation,
    qfi_vortex_closed,
    small_s_coefficients,
    spade_collinear_closed,
    vortex_closed_variants,
)
from .montecarlo import (
    BinnedImager,
    CountRecord,
    EstimationReport,
    di_binned_model,
    ml_estimate,
    run_experiment,
    sample_counts,
    spade_count_model,
)
from .numerics import (
    ConvergenceError,
    QuadratureSpec,
    finite_difference,
    golden_section_max,
    integrate_1d,
    integrate_2d,
    sum_series,
)
from .psf_modes import (
    GaussianPsf,
    HermiteGaussBasis,
    NumericPsf,
    PsfGeometry,
    centroid_mode_coupling,
    gamma_k,
    hg_mode_value,
    overlap_beta,
    overlap_delta,
    psf_geometry,
    psf_gradient_x,
    psf_value,
)
from .spectral import PulseSpectrum, RamanResonance, normalize_phi, spectral_weight

__version__ = "0.1.0"

__all__ = [
    "BinnedImager",
    "ConvergenceError",
    "CountRecord",
    "EmitterScene",
    "EstimationReport",
    "FisherReport",
    "GaussianPsf",
    "HermiteGaussBasis",
    "ImageAmplitudes",
    "NumericPsf",
    "PlaneWaveExcitation",
    "PsfGeometry",
    "PulseSpectrum",
    "QfiMatrix",
    "QuadratureSpec",
    "RamanResonance",
    "VortexExcitation",
    "amplitude_derivative_check",
    "centroid_mode_coupling",
    "di_binned_model",
    "emission_amplitude",
    "fi_direct",
    "fi_spade",
    "finite_difference",
    "gamma_k",
    "golden_section_max",
    "hg_mode_value",
    "image_amplitudes",
    "integrate_1d",
    "integrate_2d",
    "intensity_profile",
    "mean_photons_spade",
    "ml_estimate",
    "normalize_phi",
    "optimize_waist",
    "overlap_beta",
    "overlap_delta",
    "psf_geometry",
    "psf_gradient_x",
    "psf_value",
    "qfi_matrix",
    "qfi_plane_closed",
    "qfi_separation",
    "qfi_vortex_closed",
    "run_experiment",
    "sample_counts",
    "small_s_coefficients",
    "spade_collinear_closed",
    "spade_count_model",
    "spectral_weight",
    "sum_series",
    "vortex_closed_variants",
    "__version__",
]
