"""Smooth Gaussian random fields on regular grids: simulation, excursion-set
topology, and familywise-error thresholds with Monte Carlo cross-validation.
"""

from .grid import (
    FieldSpec,
    Grid,
    RngSeed,
    ScalarField,
    brownian_covariance,
    derived_field,
    field_integral,
    finite_difference,
    key_signal,
    synthetic_signal,
    white_noise,
)
from .montecarlo import (
    NoExcursionsError,
    ReplicateSummary,
    SimConfig,
    count_upcrossings,
    empirical_fwer,
    estimate_lambda,
    estimate_mean_clump_size,
    integral_variance_check,
    mask_euler_characteristic,
    replicate_field,
    run_replicates,
)
from .rft import (
    RegimeViolation,
    RiceInputs,
    ThresholdResult,
    bonferroni_threshold,
    corrected_pvalue,
    ec_density,
    expected_ec,
    poisson_clump_sup_prob,
    rft_threshold,
    rice_expected_upcrossings,
)
from .smoothing import (
    Kernel1D,
    SmoothnessParams,
    gaussian_kernel_1d,
    smooth,
    smoothed_noise_covariance,
    smoothness_params,
    stationary_variance,
)
from .topology import (
    BinaryMask,
    IntrinsicVolumes,
    closed_form_intrinsic_volumes,
    connected_components,
    euler_characteristic,
    euler_characteristic_1d,
    excursion_set,
    lattice_intrinsic_volumes,
)

__all__ = [
    "BinaryMask",
    "FieldSpec",
    "Grid",
    "IntrinsicVolumes",
    "Kernel1D",
    "NoExcursionsError",
    "RegimeViolation",
    "ReplicateSummary",
    "RiceInputs",
    "RngSeed",
    "ScalarField",
    "SimConfig",
    "SmoothnessParams",
    "ThresholdResult",
    "bonferroni_threshold",
    "brownian_covariance",
    "closed_form_intrinsic_volumes",
    "connected_components",
    "corrected_pvalue",
    "count_upcrossings",
    "derived_field",
    "ec_density",
    "empirical_fwer",
    "estimate_lambda",
    "estimate_mean_clump_size",
    "euler_characteristic",
    "euler_characteristic_1d",
    "excursion_set",
    "expected_ec",
    "field_integral",
    "finite_difference",
    "gaussian_kernel_1d",
    "integral_variance_check",
    "key_signal",
    "lattice_intrinsic_volumes",
    "mask_euler_characteristic",
    "poisson_clump_sup_prob",
    "replicate_field",
    "rft_threshold",
    "rice_expected_upcrossings",
    "run_replicates",
    "smooth",
    "smoothed_noise_covariance",
    "smoothness_params",
    "stationary_variance",
    "synthetic_signal",
    "white_noise",
]

__version__ = "0.1.0"
