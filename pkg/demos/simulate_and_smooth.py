"""Simulate white noise, smooth it at several kernel widths, and check the
variance and smoothness that theory predicts for each width.

Smoothing trades pointwise variance for spatial coherence: the field variance
drops to sigma_w^2 * sum(taps^2)^ndim while the derivative variance of the
standardized field approaches lambda = 4 ln 2 / FWHM^2.
"""

import math
from pathlib import Path

import numpy as np

from randfield import (
    Grid,
    RngSeed,
    SimConfig,
    estimate_lambda,
    gaussian_kernel_1d,
    replicate_field,
    smooth,
    smoothness_params,
    stationary_variance,
    white_noise,
)

GRID = Grid(dims=(128, 128))
FWHMS = (4.0, 8.0, 16.0)


def smoothed_replicates(fwhm: float) -> list:
    """Thirty boundary-free smoothed noise fields at the given width."""
    config = SimConfig(
        grid=GRID,
        fwhm=fwhm,
        sigma_w=1.0,
        n_replicates=30,
        thresholds=(1.0,),
        base_seed=RngSeed(12),
        crop_boundary=True,
    )
    return [replicate_field(config, r) for r in range(config.n_replicates)]


def main():
    noise = white_noise(GRID, 1.0, RngSeed(0))
    print(f"white noise on {GRID.dims}: sample variance {noise.values.var():.4f} (theory 1)")

    panels = [noise]
    for fwhm in FWHMS:
        params = smoothness_params(fwhm=fwhm)
        kernel = gaussian_kernel_1d(params, GRID.delta)
        panels.append(smooth(noise, kernel))
        theory_var = stationary_variance(kernel, 1.0, GRID.ndim)
        fields = smoothed_replicates(fwhm)
        mean_var = float(np.mean([f.values.var() for f in fields]))
        lam_hat = estimate_lambda(fields)
        print(
            f"FWHM {fwhm:5.1f}: kernel radius {kernel.truncation_radius:2d}, "
            f"field variance {mean_var:.5f} (theory {theory_var:.5f}), "
            f"lambda_hat {lam_hat:.5f} (theory {params.lam:.5f})"
        )
        assert abs(lam_hat - params.lam) / params.lam < 0.2

    plot(panels)


def plot(fields):
    try:
        import matplotlib
    except ImportError:
        print("matplotlib not installed; skipping figure")
        return
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(fields), figsize=(3.2 * len(fields), 3.4))
    titles = ["raw noise"] + [f"FWHM {int(f)}" for f in FWHMS]
    for ax, field, title in zip(axes, fields, titles):
        scale = float(np.abs(field.values).max())
        ax.imshow(field.values, cmap="RdBu_r", vmin=-scale, vmax=scale)
        ax.set_title(title)
        ax.set_axis_off()
    fig.tight_layout()
    out_dir = Path(__file__).parent / "output"
    out_dir.mkdir(exist_ok=True)
    path = out_dir / "simulate_and_smooth.png"
    fig.savefig(path, dpi=140)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
