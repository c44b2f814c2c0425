"""Monte Carlo cross-validation harness for the analytic machinery.

Replicates are driven by (seed, stream) pairs: replicate r of a simulation
with base seed (s, k) uses stream k + r, so any replicate can be regenerated
in isolation and results do not depend on execution order or worker count.

Boundary handling: zero-padded smoothing depresses the variance near the
grid edge.  With ``crop_boundary`` the noise is generated on a grid enlarged
by the kernel truncation radius on every side and only the central analysis
window is kept, so every retained cell has the exact stationary interior
covariance.  Signals are extended into the pad band by edge replication.

Standardization modes for null calibration:

    "none"    raw smoothed values
    "sample"  divide by the replicate's own sample standard deviation
              (unit sample variance, recorded per replicate)
    "theory"  divide by the exact interior standard deviation of smoothed
              white noise (one deterministic divisor for all replicates)
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .grid import Grid, RngSeed, ScalarField, white_noise
from .smoothing import (
    Kernel1D,
    gaussian_kernel_1d,
    smooth,
    smoothness_params,
    stationary_variance,
)
from .topology import (
    BinaryMask,
    connected_components,
    euler_characteristic,
    euler_characteristic_1d,
    excursion_set,
)

STANDARDIZE_MODES = ("none", "sample", "theory")


class NoExcursionsError(ValueError):
    """No excursion component was found at the requested threshold."""


@dataclass(frozen=True)
class SimConfig:
    """Replicated simulation: grid, kernel, noise level, seeds, thresholds.

    ``fwhm = 0`` disables smoothing.  ``thresholds`` must increase strictly.
    """

    grid: Grid
    fwhm: float
    sigma_w: float
    n_replicates: int
    thresholds: tuple[float, ...]
    base_seed: RngSeed
    signal: ScalarField | None = None
    standardize: str = "none"
    crop_boundary: bool = False

    def __post_init__(self):
        if not (self.fwhm >= 0 and math.isfinite(self.fwhm)):
            raise ValueError(f"fwhm must be a non-negative real, got {self.fwhm}")
        if not (self.sigma_w > 0 and math.isfinite(self.sigma_w)):
            raise ValueError(f"sigma_w must be a positive real, got {self.sigma_w}")
        if self.n_replicates < 1:
            raise ValueError(f"n_replicates must be >= 1, got {self.n_replicates}")
        thresholds = tuple(float(h) for h in self.thresholds)
        object.__setattr__(self, "thresholds", thresholds)
        if len(thresholds) == 0:
            raise ValueError("need at least one threshold")
        if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")
        if any(not math.isfinite(h) for h in thresholds):
            raise ValueError("thresholds must be finite")
        if self.standardize not in STANDARDIZE_MODES:
            raise ValueError(f"standardize must be one of {STANDARDIZE_MODES}")
        if self.signal is not None and self.signal.grid != self.grid:
            raise ValueError("signal must live on the simulation grid")

    def kernel(self) -> Kernel1D | None:
        if self.fwhm == 0.0:
            return None
        return gaussian_kernel_1d(smoothness_params(fwhm=self.fwhm), self.grid.delta)


@dataclass(frozen=True)
class ReplicateSummary:
    """Per-replicate suprema and EC curves plus their across-replicate summaries."""

    thresholds: np.ndarray
    sup_values: np.ndarray
    ec_curves: np.ndarray
    mean_ec: np.ndarray
    empirical_fwer: np.ndarray
    standardization: np.ndarray  # divisor applied to each replicate (1.0 = none)
    standardize_mode: str


def mask_euler_characteristic(mask: BinaryMask) -> int:
    """EC for any supported dimension; 1D falls back to the run count."""
    if mask.grid.ndim == 1:
        return euler_characteristic_1d(mask)
    return euler_characteristic(mask)


def _padded_layout(config: SimConfig):
    """(simulation grid, core slices, pad width) for the boundary mode."""
    kernel = config.kernel()
    pad = kernel.truncation_radius if (config.crop_boundary and kernel is not None) else 0
    sim_grid = Grid(tuple(d + 2 * pad for d in config.grid.dims), config.grid.delta)
    core = tuple(slice(pad, pad + d) for d in config.grid.dims)
    return sim_grid, core, pad


def _theory_divisor(config: SimConfig) -> float:
    kernel = config.kernel()
    if kernel is None:
        return config.sigma_w
    return math.sqrt(stationary_variance(kernel, config.sigma_w, config.grid.ndim))


def _replicate_values(config: SimConfig, r: int):
    """Raw replicate pipeline: returns (values on the analysis grid, divisor)."""
    sim_grid, core, pad = _padded_layout(config)
    noise = white_noise(sim_grid, config.sigma_w, config.base_seed.child(r))
    values = noise.values.copy()
    if config.signal is not None:
        signal = config.signal.values
        if pad > 0:
            signal = np.pad(signal, pad, mode="edge")
        values += signal
    kernel = config.kernel()
    if kernel is not None:
        values = smooth(ScalarField(sim_grid, values), kernel).values
    values = values[core]
    if config.standardize == "sample":
        divisor = float(np.std(values))
        if divisor == 0.0:
            raise ValueError("cannot standardize a constant replicate")
    elif config.standardize == "theory":
        divisor = _theory_divisor(config)
    else:
        divisor = 1.0
    return values / divisor, divisor


def replicate_field(config: SimConfig, r: int) -> ScalarField:
    """Fully processed field of replicate ``r``; bit-reproducible."""
    if not 0 <= r < config.n_replicates:
        raise ValueError(f"replicate index {r} outside 0..{config.n_replicates - 1}")
    values, _ = _replicate_values(config, r)
    return ScalarField(config.grid, values)


def run_replicates(config: SimConfig, n_workers: int = 1) -> ReplicateSummary:
    """Simulate all replicates and summarise suprema and EC curves.

    Results are stored by replicate index and reduced in index order, so the
    summary is bit-identical for any ``n_workers``.
    """
    if n_workers < 1:
        raise ValueError(f"n_workers must be >= 1, got {n_workers}")
    n_rep = config.n_replicates
    thresholds = np.array(config.thresholds)
    sup_values = np.empty(n_rep)
    ec_curves = np.empty((n_rep, thresholds.size), dtype=np.int64)
    divisors = np.empty(n_rep)

    def one(r: int):
        values, divisor = _replicate_values(config, r)
        sup_values[r] = values.max()
        for t, h in enumerate(thresholds):
            ec_curves[r, t] = mask_euler_characteristic(
                BinaryMask(config.grid, values > h)
            )
        divisors[r] = divisor

    if n_workers == 1:
        for r in range(n_rep):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(n_rep)))

    mean_ec = ec_curves.mean(axis=0)
    fwer = np.array([empirical_fwer(sup_values, h) for h in thresholds])
    return ReplicateSummary(
        thresholds=thresholds,
        sup_values=sup_values,
        ec_curves=ec_curves,
        mean_ec=mean_ec,
        empirical_fwer=fwer,
        standardization=divisors,
        standardize_mode=config.standardize,
    )


def empirical_fwer(sup_values, h: float) -> float:
    """Fraction of replicates whose supremum exceeds h, strictly."""
    sup_values = np.asarray(sup_values, dtype=np.float64)
    if sup_values.size == 0:
        raise ValueError("need at least one supremum")
    return float(np.count_nonzero(sup_values > h) / sup_values.size)


def estimate_lambda(fields, delta: float | None = None, crop: int = 0) -> float:
    """Derivative-variance estimate of lambda from replicate fields.

    Each field is standardized to unit sample variance; lambda is the sample
    variance of the forward difference quotients, averaged over axes and
    fields.  ``crop`` drops a boundary band of that many cells first (use
    the kernel truncation radius to remove zero-padding bias).
    """
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one field")
    if delta is None:
        delta = fields[0].grid.delta
    if not (delta > 0 and math.isfinite(delta)):
        raise ValueError(f"delta must be a positive real, got {delta}")
    if crop < 0:
        raise ValueError(f"crop must be >= 0, got {crop}")
    variances = []
    for field in fields:
        values = field.values
        if crop:
            if any(n <= 2 * crop + 1 for n in values.shape):
                raise ValueError("crop leaves no interior cells")
            values = values[(slice(crop, -crop),) * values.ndim]
        sd = float(np.std(values))
        if sd == 0.0:
            raise ValueError("cannot estimate lambda from a constant field")
        u = values / sd
        for axis in range(u.ndim):
            variances.append(float(np.var(np.diff(u, axis=axis) / delta)))
    return float(np.mean(variances))


def estimate_mean_clump_size(fields, h: float) -> float:
    """Mean excursion-component measure (cells times delta^N) above h,
    pooled over all components of all fields."""
    fields = list(fields)
    if not fields:
        raise ValueError("need at least one field")
    total_cells = 0
    total_components = 0
    for field in fields:
        _, sizes = connected_components(excursion_set(field, h))
        total_cells += sum(sizes)
        total_components += len(sizes)
    if total_components == 0:
        raise NoExcursionsError(f"no excursion component found above h = {h:g}")
    return total_cells / total_components * fields[0].grid.cell_measure


def integral_variance_check(config: SimConfig):
    """Empirical vs exact variance of the field integral under the null.

    Runs the raw pipeline (no standardization, no cropping): the theoretical
    value is the double Riemann sum of the zero-pad smoothed-noise
    covariance over the grid, which factorises into one tap-mass sum per
    axis.  Returns (empirical, theoretical).
    """
    raw = replace(config, standardize="none", crop_boundary=False, signal=None)
    cell = raw.grid.cell_measure
    integrals = np.empty(raw.n_replicates)
    for r in range(raw.n_replicates):
        values, _ = _replicate_values(raw, r)
        integrals[r] = values.sum(dtype=np.float64) * cell
    empirical = float(np.var(integrals, ddof=1))
    kernel = raw.kernel()
    theoretical = raw.sigma_w**2 * cell**2
    if kernel is None:
        theoretical *= raw.grid.n_cells
    else:
        for n in raw.grid.dims:
            theoretical *= _site_mass_square_sum(kernel, n)
    return empirical, theoretical


def _site_mass_square_sum(kernel: Kernel1D, n: int) -> float:
    """sum_i (sum of taps landing in-grid when centred at site i)^2."""
    radius = kernel.truncation_radius
    cum = np.concatenate(([0.0], np.cumsum(kernel.taps)))
    sites = np.arange(n)
    lo = np.clip(sites - radius, 0, n - 1) - sites + radius
    hi = np.clip(sites + radius, 0, n - 1) - sites + radius
    masses = cum[hi + 1] - cum[lo]
    return float(masses @ masses)


def count_upcrossings(values, h: float) -> int:
    """Number of i with values[i] <= h < values[i+1] along a 1D sample path."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("need a 1D path with at least two samples")
    return int(np.count_nonzero((values[:-1] <= h) & (values[1:] > h)))
