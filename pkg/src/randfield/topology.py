"""Excursion sets and their topology on regular lattices.

A binary mask selects lattice cells; the selected set is the union of the
closed unit hypercubes centred on those cells.  The Euler characteristic is
the alternating sum of the face counts of that closed cubical complex
(V - E + F in 2D, V - E + F - C in 3D), which matches 8-adjacency (2D) and
26-adjacency (3D) foreground connectivity.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import Grid, ScalarField


@dataclass(frozen=True)
class BinaryMask:
    """Boolean lattice selection, one bit per grid point."""

    grid: Grid
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.dtype != np.bool_:
            raise ValueError("mask bits must be boolean")
        if bits.size != self.grid.n_cells:
            raise ValueError(
                f"bit count {bits.size} does not match grid with {self.grid.n_cells} points"
            )
        bits = np.ascontiguousarray(bits.reshape(self.grid.dims))
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class IntrinsicVolumes:
    """mu[d] for d = 0..N; mu[0] is the Euler characteristic, mu[N] the measure."""

    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=np.float64)
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        if mu.ndim != 1 or not 1 <= mu.size <= 4:
            raise ValueError("mu must hold between 1 and 4 entries")
        if not np.isfinite(mu).all():
            raise ValueError("intrinsic volumes must be finite")

    def __getitem__(self, d: int) -> float:
        return float(self.mu[d])

    def __len__(self) -> int:
        return self.mu.size


def excursion_set(field: ScalarField, threshold: float) -> BinaryMask:
    """Cells where the field exceeds the threshold, strictly."""
    if math.isnan(threshold):
        raise ValueError("threshold must not be NaN")
    return BinaryMask(field.grid, field.values > threshold)


def _face_counts(bits: np.ndarray) -> np.ndarray:
    """Count k-dimensional faces of the closed cubical complex, k = 0..N.

    A face spanning the axis subset S sits at integer positions aligned with
    cells along S and with cell corners elsewhere; it belongs to the complex
    iff any of the 2^(N-|S|) cells touching it is set.  Padding by one layer
    of zeros turns every such test into an OR of shifted slices.
    """
    nd = bits.ndim
    padded = np.zeros(tuple(n + 2 for n in bits.shape), dtype=bool)
    padded[(slice(1, -1),) * nd] = bits
    counts = np.zeros(nd + 1, dtype=np.int64)
    for spanned in itertools.product((False, True), repeat=nd):
        k = sum(spanned)
        free_axes = [a for a in range(nd) if not spanned[a]]
        present = None
        for offsets in itertools.product((0, 1), repeat=len(free_axes)):
            index = []
            off_iter = iter(offsets)
            for axis, n in enumerate(bits.shape):
                if spanned[axis]:
                    index.append(slice(1, n + 1))
                else:
                    o = next(off_iter)
                    index.append(slice(o, o + n + 1))
            piece = padded[tuple(index)]
            present = piece if present is None else (present | piece)
        counts[k] += np.count_nonzero(present)
    return counts


def euler_characteristic(mask: BinaryMask) -> int:
    """Alternating face-count sum of the closed complex; 2D and 3D masks."""
    nd = mask.grid.ndim
    if nd == 1:
        raise ValueError(
            "euler_characteristic supports 2D and 3D masks; "
            "use euler_characteristic_1d for interval counts"
        )
    counts = _face_counts(mask.bits)
    signs = (-1) ** np.arange(nd + 1)
    return int((signs * counts).sum())


def euler_characteristic_1d(mask: BinaryMask) -> int:
    """Number of runs of consecutive set cells in a 1D mask."""
    if mask.grid.ndim != 1:
        raise ValueError("euler_characteristic_1d needs a 1D mask")
    bits = mask.bits
    if bits.size == 0 or not bits.any():
        return 0
    starts = int(bits[0]) + int(np.count_nonzero(bits[1:] & ~bits[:-1]))
    return starts


def lattice_intrinsic_volumes(mask: BinaryMask) -> IntrinsicVolumes:
    """(mu0, mu1, mu2) of a 2D closed pixel union from its V, E, F counts.

    mu0 = V - E + F, mu1 = (E - 2F) * delta, mu2 = F * delta^2.
    """
    if mask.grid.ndim != 2:
        raise ValueError("lattice_intrinsic_volumes supports 2D masks only")
    v, e, f = _face_counts(mask.bits)
    d = mask.grid.delta
    return IntrinsicVolumes(np.array([v - e + f, (e - 2 * f) * d, f * d * d]))


def closed_form_intrinsic_volumes(shape: str, *sizes: float) -> IntrinsicVolumes:
    """Continuum intrinsic volumes of a 3D ball or box.

    ball(r):     (1, 4r, 2 pi r^2, 4/3 pi r^3)
    box(a,b,c):  (1, a + b + c, ab + bc + ac, abc)
    """
    if shape == "ball":
        if len(sizes) != 1:
            raise ValueError("ball takes a single radius")
        (r,) = sizes
        if not (r > 0 and math.isfinite(r)):
            raise ValueError(f"radius must be a positive real, got {r}")
        return IntrinsicVolumes(
            np.array([1.0, 4.0 * r, 2.0 * math.pi * r**2, 4.0 / 3.0 * math.pi * r**3])
        )
    if shape == "box":
        if len(sizes) != 3:
            raise ValueError("box takes three side lengths")
        a, b, c = sizes
        for s in sizes:
            if not (s > 0 and math.isfinite(s)):
                raise ValueError(f"side lengths must be positive reals, got {sizes}")
        return IntrinsicVolumes(
            np.array([1.0, a + b + c, a * b + b * c + a * c, a * b * c])
        )
    raise ValueError(f'shape must be "ball" or "box", got {shape!r}')


def connected_components(mask: BinaryMask):
    """Label components under 8-/26-adjacency; labels follow raster order.

    Returns (labels, sizes): ``labels`` is an int array with 0 outside the
    mask and components numbered from 1 by smallest linear index first;
    ``sizes`` holds the cell count of each component.
    """
    nd = mask.grid.ndim
    structure = np.ones((3,) * nd, dtype=bool)
    labels, count = ndimage.label(mask.bits, structure=structure)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)[1:]
    return labels, [int(s) for s in sizes]
