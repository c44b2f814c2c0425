"""Gaussian kernel smoothing of lattice fields.

Smoothing is separable: one odd, symmetric, unit-sum 1D kernel applied along
each axis in turn.  Convolution is "same" size with zero padding, i.e. the
lattice sum runs over in-grid sites only, which is exactly what the
smoothed-noise covariance formula below assumes.

Smoothness is carried by any one of three equivalent parameters of the
Gaussian kernel exp(-x^2 / (2 sigma^2)):

    fwhm = sigma * sqrt(8 ln 2)        full width at half maximum
    lam  = 1 / (2 sigma^2)             derivative variance of the smoothed
         = 4 ln 2 / fwhm^2             unit-variance field (lambda)

Only the isotropic kernel is implemented.  The anisotropic generalisation
(a diagonal matrix of per-axis fwhm values, lambda_d = 4 ln 2 / fwhm_d^2)
is recorded here but out of scope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import Grid, ScalarField

_LN8_2 = math.sqrt(8.0 * math.log(2.0))  # fwhm / sigma for a Gaussian

# Kernel taps are cut at 4 sigma and renormalised; beyond that the lost mass
# is below 7e-5 of the total.
TRUNCATION_SIGMAS = 4.0


@dataclass(frozen=True)
class SmoothnessParams:
    """Consistent (sigma, fwhm, lambda) triple for a Gaussian kernel."""

    sigma: float
    fwhm: float
    lam: float

    def __post_init__(self):
        for name in ("sigma", "fwhm", "lam"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a positive real, got {v}")
        if not math.isclose(self.fwhm, self.sigma * _LN8_2, rel_tol=1e-9):
            raise ValueError("fwhm does not match sigma * sqrt(8 ln 2)")
        if not math.isclose(self.lam, 1.0 / (2.0 * self.sigma**2), rel_tol=1e-9):
            raise ValueError("lam does not match 1 / (2 sigma^2)")


def smoothness_params(
    sigma: float | None = None,
    fwhm: float | None = None,
    lam: float | None = None,
) -> SmoothnessParams:
    """Build the full parameter triple from exactly one of its members."""
    given = [(n, v) for n, v in (("sigma", sigma), ("fwhm", fwhm), ("lam", lam)) if v is not None]
    if len(given) != 1:
        raise ValueError("specify exactly one of sigma, fwhm, lam")
    name, value = given[0]
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive real, got {value}")
    if name == "sigma":
        s = float(value)
    elif name == "fwhm":
        s = float(value) / _LN8_2
    else:
        s = math.sqrt(1.0 / (2.0 * float(value)))
    return SmoothnessParams(sigma=s, fwhm=s * _LN8_2, lam=1.0 / (2.0 * s**2))


@dataclass(frozen=True)
class Kernel1D:
    """Odd-length symmetric non-negative taps summing to one.

    ``scale_sigma`` is the Gaussian sigma in grid units (sigma / delta);
    ``truncation_radius`` is the tap count on each side of the centre.
    """

    taps: np.ndarray
    scale_sigma: float
    truncation_radius: int

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)
        if taps.ndim != 1 or taps.size % 2 != 1:
            raise ValueError("taps must be a 1D array of odd length")
        if taps.size != 2 * self.truncation_radius + 1:
            raise ValueError("taps length must equal 2 * truncation_radius + 1")
        if (taps < 0).any():
            raise ValueError("taps must be non-negative")
        if abs(taps.sum() - 1.0) > 1e-12:
            raise ValueError("taps must sum to 1 within 1e-12")
        if np.abs(taps - taps[::-1]).max() > 1e-12:
            raise ValueError("taps must be symmetric within 1e-12")


def gaussian_kernel_1d(params: SmoothnessParams, delta: float) -> Kernel1D:
    """Discrete Gaussian taps exp(-(k delta)^2 / (2 sigma^2)), renormalised.

    The support is k in [-R, R] with R = ceil(4 sigma / delta).  As
    sigma/delta -> 0 the kernel tends to a discrete impulse.
    """
    if not (delta > 0 and math.isfinite(delta)):
        raise ValueError(f"delta must be a positive real, got {delta}")
    sigma_grid = params.sigma / delta
    radius_f = TRUNCATION_SIGMAS * sigma_grid
    if radius_f > 2**30:
        raise ValueError(
            f"kernel radius {radius_f:.3g} cells exceeds the addressable grid size; "
            "sigma is too large for this spacing"
        )
    radius = max(1, math.ceil(radius_f))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (offsets / sigma_grid) ** 2)
    taps /= taps.sum()
    # Exact symmetrisation: averaging with the reversal cancels summation
    # round-off so the Kernel1D invariants hold to 1e-12.
    taps = 0.5 * (taps + taps[::-1])
    taps /= taps.sum()
    return Kernel1D(taps=taps, scale_sigma=sigma_grid, truncation_radius=radius)


def smooth(field: ScalarField, kernel: Kernel1D) -> ScalarField:
    """Separable same-size convolution with zero padding outside the grid.

    The same 1D kernel runs along every axis in a fixed axis order with a
    fixed tap order, so results are reproducible bit-for-bit regardless of
    any outer scheduling.
    """
    n_taps = kernel.taps.size
    for d in field.grid.dims:
        if n_taps > 2 * d + 1:
            raise ValueError(
                f"kernel with {n_taps} taps is longer than 2*dim+1 = {2 * d + 1}"
            )
    out = field.values
    for axis in range(field.grid.ndim):
        out = ndimage.convolve1d(out, kernel.taps, axis=axis, mode="constant", cval=0.0)
    return ScalarField(field.grid, out)


def _axis_tap_profile(kernel: Kernel1D, point: int, n: int) -> np.ndarray:
    """K(x - x_i) along one axis: taps centred at ``point``, clipped to the grid."""
    profile = np.zeros(n)
    r = kernel.truncation_radius
    lo = max(0, point - r)
    hi = min(n - 1, point + r)
    profile[lo : hi + 1] = kernel.taps[lo - point + r : hi - point + r + 1]
    return profile


def smoothed_noise_covariance(
    kernel: Kernel1D, sigma_w: float, x, y, grid: Grid
) -> float:
    """Exact covariance of zero-pad smoothed white noise at lattice points.

    R(x, y) = sigma_w^2 * sum_i K(x - x_i) K(y - x_i) over in-grid sites i,
    where K is the separable product of the 1D taps.  Because the grid is a
    product set the site sum factorises into one sum per axis.
    """
    if not (sigma_w > 0 and math.isfinite(sigma_w)):
        raise ValueError(f"sigma_w must be a positive real, got {sigma_w}")
    x = tuple(int(c) for c in np.atleast_1d(x))
    y = tuple(int(c) for c in np.atleast_1d(y))
    if len(x) != grid.ndim or len(y) != grid.ndim:
        raise ValueError("points must have one coordinate per grid axis")
    for p in (x, y):
        for c, n in zip(p, grid.dims):
            if not 0 <= c < n:
                raise ValueError(f"point {p} is outside the grid {grid.dims}")
    cov = sigma_w**2
    for axis, n in enumerate(grid.dims):
        a = _axis_tap_profile(kernel, x[axis], n)
        b = _axis_tap_profile(kernel, y[axis], n)
        cov *= float(a @ b)
    return cov


def stationary_variance(kernel: Kernel1D, sigma_w: float, ndim: int) -> float:
    """Interior variance of smoothed white noise, sigma_w^2 (sum K^2)^N.

    Valid wherever the kernel support stays inside the grid; used to
    standardise simulated fields without per-replicate estimation noise.
    """
    if not (sigma_w > 0 and math.isfinite(sigma_w)):
        raise ValueError(f"sigma_w must be a positive real, got {sigma_w}")
    tap_power = float(kernel.taps @ kernel.taps)
    return sigma_w**2 * tap_power**ndim
