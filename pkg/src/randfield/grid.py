"""Regular grids and scalar random fields defined on them.

A field lives on a regular lattice with common spacing ``delta`` along every
axis.  Values are stored row-major (C order), one per lattice point.  All
generation is driven by explicit (seed, stream) pairs so that any field can
be reproduced bit-for-bit on the same build.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Hard cap on addressable lattice size; keeps index arithmetic in int range.
MAX_CELLS = 2**31

FAMILIES = ("gaussian", "f")


@dataclass(frozen=True)
class Grid:
    """Regular lattice: per-axis point counts and one spacing for all axes."""

    dims: tuple[int, ...]
    delta: float = 1.0

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "delta", float(self.delta))
        if not 1 <= len(dims) <= 3:
            raise ValueError(f"grid must have 1 to 3 axes, got {len(dims)}")
        if any(d < 1 for d in dims):
            raise ValueError(f"every axis needs at least one point, got {dims}")
        if math.prod(dims) > MAX_CELLS:
            raise ValueError(f"grid has more than {MAX_CELLS} cells")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be a positive real, got {self.delta}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def n_cells(self) -> int:
        return math.prod(self.dims)

    @property
    def cell_measure(self) -> float:
        """Volume element delta**N used by Riemann sums."""
        return self.delta ** self.ndim


@dataclass(frozen=True)
class RngSeed:
    """64-bit seed plus a stream index; distinct streams are independent."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng((self.seed, self.stream))

    def child(self, offset: int) -> "RngSeed":
        """Seed for a derived stream, e.g. replicate r of a simulation."""
        return RngSeed(self.seed, self.stream + offset)


@dataclass(frozen=True)
class ScalarField:
    """One real value per lattice point of ``grid``, row-major.

    ``degenerate`` marks fields that carry +inf markers from a degenerate
    construction (an F ratio with a zero denominator); everything else is
    required to be finite.
    """

    grid: Grid
    values: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.size != self.grid.n_cells:
            raise ValueError(
                f"value count {values.size} does not match grid with {self.grid.n_cells} points"
            )
        values = np.ascontiguousarray(values.reshape(self.grid.dims))
        if np.isnan(values).any():
            raise ValueError("field values must not contain NaN")
        if not self.degenerate and np.isinf(values).any():
            raise ValueError("non-degenerate field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class FieldSpec:
    """Statistic family of a field plus its smoothness.

    ``lam`` is the variance of each spatial derivative of the underlying
    unit-variance Gaussian components (lambda in the EC density formulas).
    """

    family: str
    lam: float
    df: tuple[int, int] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be a positive real, got {self.lam}")
        if self.family == "f":
            if self.df is None:
                raise ValueError("F family needs df=(alpha, beta)")
            a, b = self.df
            if not (a >= 1 and b >= 1):
                raise ValueError(f"F degrees of freedom must be >= 1, got {self.df}")
            object.__setattr__(self, "df", (int(a), int(b)))
        elif self.df is not None:
            raise ValueError("df is only meaningful for the F family")


def white_noise(grid: Grid, sigma_w: float, seed: RngSeed) -> ScalarField:
    """Independent N(0, sigma_w^2) draws, one per lattice point.

    The discrete stand-in for delta-correlated noise: distinct points are
    uncorrelated, so the empirical covariance between any two fixed points
    vanishes as replicates accumulate.
    """
    if not (sigma_w > 0 and math.isfinite(sigma_w)):
        raise ValueError(f"sigma_w must be a positive real, got {sigma_w}")
    rng = seed.generator()
    return ScalarField(grid, rng.normal(0.0, sigma_w, size=grid.dims))


def synthetic_signal(grid: Grid) -> ScalarField:
    """Deterministic test surface cos(10x) + sin(8y) on the unit square.

    Lattice point (i, j) maps to (i/(n0-1), j/(n1-1)), so the grid spans
    [0, 1]^2 regardless of its resolution.
    """
    if grid.ndim != 2:
        raise ValueError("synthetic_signal is defined on 2D grids only")
    if any(d < 2 for d in grid.dims):
        raise ValueError("synthetic_signal needs at least 2 points per axis")
    n0, n1 = grid.dims
    x = np.arange(n0) / (n0 - 1)
    y = np.arange(n1) / (n1 - 1)
    return ScalarField(grid, np.cos(10.0 * x)[:, None] + np.sin(8.0 * y)[None, :])


# Fractional layout of the procedural key-shaped test object: a ring with a
# rectangular hole plus a stem, genus 1, so its Euler characteristic is 0.
_KEY_HEAD = (0.04, 0.66, 0.08, 0.92)   # row_lo, row_hi, col_lo, col_hi
_KEY_HOLE = (0.20, 0.48, 0.27, 0.73)
_KEY_STEM = (0.66, 0.94, 0.36, 0.64)


def key_signal(grid: Grid) -> ScalarField:
    """Binary key-with-hole object encoded as +1 (object) / -1 (background).

    The +-1 encoding puts the threshold band in which the excursion set
    equals the object symmetrically around 0, so a mid curve threshold like
    -0.5 or +0.5 recovers the genus-1 shape once noise is smoothed away.
    """
    if grid.ndim != 2:
        raise ValueError("key_signal is defined on 2D grids only")
    if any(d < 16 for d in grid.dims):
        raise ValueError("key_signal needs at least 16 points per axis")
    n0, n1 = grid.dims

    def box(frac):
        r0, r1, c0, c1 = frac
        return (
            slice(int(round(r0 * n0)), int(round(r1 * n0))),
            slice(int(round(c0 * n1)), int(round(c1 * n1))),
        )

    inside = np.zeros(grid.dims, dtype=bool)
    inside[box(_KEY_HEAD)] = True
    inside[box(_KEY_HOLE)] = False
    inside[box(_KEY_STEM)] = True
    return ScalarField(grid, np.where(inside, 1.0, -1.0))


def _check_components(components, minimum):
    if len(components) < minimum:
        raise ValueError(f"need at least {minimum} component fields, got {len(components)}")
    grid = components[0].grid
    for f in components:
        if f.grid != grid:
            raise ValueError("all component fields must share one grid")
    return grid


def derived_field(kind: str, components, df: tuple[int, int] | None = None) -> ScalarField:
    """Pointwise statistic field built from independent Gaussian components.

    kind "chi2": sum of squares of all m components.
    kind "t":    X0 / sqrt(sum(X1..Xm ** 2) / m) from m + 1 components.
    kind "f":    (sum of first alpha squares / alpha) / (sum of last beta
                 squares / beta); requires df=(alpha, beta) with
                 alpha + beta components.  A zero denominator yields +inf
                 and marks the field degenerate instead of aborting;
                 excursion sets treat +inf as above any finite threshold.
    """
    if kind == "chi2":
        grid = _check_components(components, 1)
        total = np.zeros(grid.dims)
        for f in components:
            total += f.values**2
        return ScalarField(grid, total)
    if kind == "t":
        grid = _check_components(components, 2)
        m = len(components) - 1
        denom_sq = np.zeros(grid.dims)
        for f in components[1:]:
            denom_sq += f.values**2
        return ScalarField(grid, components[0].values / np.sqrt(denom_sq / m))
    if kind == "f":
        if df is None:
            raise ValueError('kind "f" needs df=(alpha, beta)')
        alpha, beta = int(df[0]), int(df[1])
        if alpha < 1 or beta < 1:
            raise ValueError(f"degrees of freedom must be >= 1, got {df}")
        grid = _check_components(components, alpha + beta)
        if len(components) != alpha + beta:
            raise ValueError(
                f"F field with df=({alpha}, {beta}) needs {alpha + beta} components, "
                f"got {len(components)}"
            )
        num = np.zeros(grid.dims)
        for f in components[:alpha]:
            num += f.values**2
        den = np.zeros(grid.dims)
        for f in components[alpha:]:
            den += f.values**2
        num /= alpha
        den /= beta
        zero = den == 0.0
        degenerate = bool(zero.any())
        with np.errstate(divide="ignore"):
            ratio = np.where(zero, np.inf, num / np.where(zero, 1.0, den))
        return ScalarField(grid, ratio, degenerate=degenerate)
    raise ValueError(f'kind must be "chi2", "t" or "f", got {kind!r}')


def field_integral(field: ScalarField) -> float:
    """Riemann sum of the field: sum of values times delta**N."""
    return float(field.values.sum(dtype=np.float64) * field.grid.cell_measure)


def finite_difference(field: ScalarField, axis: int) -> ScalarField:
    """Forward difference quotient along ``axis``; output loses one plane."""
    grid = field.grid
    if not 0 <= axis < grid.ndim:
        raise ValueError(f"axis {axis} out of range for a {grid.ndim}D grid")
    if grid.dims[axis] < 2:
        raise ValueError(f"axis {axis} needs at least 2 points to difference")
    out_dims = tuple(
        d - 1 if a == axis else d for a, d in enumerate(grid.dims)
    )
    diff = np.diff(field.values, axis=axis) / grid.delta
    return ScalarField(Grid(out_dims, grid.delta), diff)


def brownian_covariance(x: float, y: float) -> float:
    """Covariance min(x, y) of standard Brownian motion on [0, inf).

    Named covariance model used by covariance tests; no path simulator is
    built on it.
    """
    if x < 0 or y < 0:
        raise ValueError("Brownian motion covariance is defined for x, y >= 0")
    return min(x, y)
